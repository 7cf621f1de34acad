//! Pixel-level thresholding and object-level refinement.
//!
//! The posterior is thresholded at `tau_pixel` (default 0.25 = 0.5^2, i.e.
//! both the prior and the likelihood at least 0.5). A panoptic instance whose
//! moving-pixel fraction strictly exceeds `tau_obj` is then promoted to
//! wholly moving, otherwise wholly suppressed; the low default of 0.01 exists
//! because a partially stationary object's moving part can be as small as a
//! few percent of its area. Uninstanced "stuff" pixels keep their pixel-level
//! label, since the refinement is only defined over object instances.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::seg_prior::PanopticMap;
use crate::types::{BinaryMask, ProbabilityMap};

/// Pixels with posterior `>= tau_pixel`.
pub fn pixel_mask(posterior: &ProbabilityMap, tau_pixel: f64) -> BinaryMask {
    BinaryMask::from_fn(posterior.width(), posterior.height(), |x, y| {
        posterior.at(x, y) >= tau_pixel
    })
}

/// Promotes or suppresses whole instances by their moving-pixel fraction.
pub fn object_mask(pixels: &BinaryMask, seg: &PanopticMap, tau_obj: f64) -> Result<BinaryMask> {
    seg.same_dims(pixels.width(), pixels.height())?;

    // (total, moving) per instance id > 0; BTreeMap keeps this deterministic.
    let mut stats: BTreeMap<u16, (usize, usize)> = BTreeMap::new();
    for idx in 0..pixels.len() {
        let inst = seg.instance(idx);
        if inst > 0 {
            let entry = stats.entry(inst).or_insert((0, 0));
            entry.0 += 1;
            if pixels.get(idx) {
                entry.1 += 1;
            }
        }
    }

    let mut out = BinaryMask::new(pixels.width(), pixels.height());
    for idx in 0..pixels.len() {
        let inst = seg.instance(idx);
        if inst == 0 {
            out.set(idx, pixels.get(idx));
        } else {
            let (total, moving) = stats[&inst];
            let fraction = moving as f64 / total as f64;
            out.set(idx, fraction > tau_obj);
        }
    }
    Ok(out)
}
