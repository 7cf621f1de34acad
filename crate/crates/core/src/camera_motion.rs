//! Camera-motion gate: is the camera moving at all?
//!
//! No egomotion is estimated. The decision is simply whether a large enough
//! fraction of the static area (as identified by the segmentation prior)
//! carries significant optical flow.

use crate::error::{Error, Result};
use crate::flow_io::FlowField;
use crate::types::BinaryMask;

/// Fraction of valid static-area pixels whose flow magnitude exceeds `eps_mag`.
pub fn flow_existing_ratio(
    flow: &FlowField,
    static_area: &BinaryMask,
    eps_mag: f64,
) -> Result<f64> {
    static_area.same_dims(flow.width(), flow.height())?;
    let mut total = 0usize;
    let mut with_flow = 0usize;
    for idx in 0..flow.len() {
        if static_area.get(idx) && flow.is_valid(idx) {
            total += 1;
            if flow.magnitude(idx) > eps_mag {
                with_flow += 1;
            }
        }
    }
    if total == 0 {
        return Err(Error::EmptyStaticArea);
    }
    Ok(with_flow as f64 / total as f64)
}

/// Strictly-greater comparison against the motion threshold.
pub fn is_camera_moving(ratio: f64, tau_move: f64) -> bool {
    ratio > tau_move
}
