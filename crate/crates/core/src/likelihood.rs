//! FoE-based moving likelihood and its fusion with the segmentation prior.
//!
//! Per pixel, the likelihood combines an angle term with a log relative
//! flow-length term:
//!
//! ```text
//! P_a   = clip[0,1](0.5 * d_a / theta_th)
//! d_l   = |v| / mean(|v_static|)          (floored at eps_len)
//! F_l   = |log10(d_l)|                    (capped at fl_cap)
//! P_FoE = clip[0,1](P_a + alpha * F_l)
//! P_M   = P_seg * P_FoE
//! ```
//!
//! The angle term alone misses objects moving parallel to the camera whose
//! flow direction matches the background; the length factor covers exactly
//! that case while the log keeps nearby static objects (large but
//! FoE-consistent flow) from lighting up.

use crate::error::{Error, Result};
use crate::flow_io::FlowField;
use crate::foe::{angular_deviation, SignedFoe};
use crate::types::{BinaryMask, ProbabilityMap};

/// Likelihood controls. `alpha` weights the length factor; `theta_th` is the
/// angle at which the angle term alone reaches 0.5.
#[derive(Debug, Clone, Copy)]
pub struct LikelihoodParams {
    pub alpha: f64,
    pub theta_th: f64,
    /// Floor for the relative flow length, keeping the log finite.
    pub eps_len: f64,
    /// Cap for the length factor; with the default alpha the cap already
    /// saturates the clip, so behavior is unchanged.
    pub fl_cap: f64,
    /// Static-camera fallback scale: likelihood = |v| / m_stop, clipped.
    pub m_stop: f64,
    /// Magnitude floor defining which static pixels enter the mean.
    pub eps_mag: f64,
    /// Pixels at or below this magnitude carry no motion evidence.
    pub min_mag: f64,
}

impl Default for LikelihoodParams {
    fn default() -> Self {
        Self {
            alpha: 0.25,
            theta_th: std::f64::consts::FRAC_PI_6,
            eps_len: 1e-3,
            fl_cap: 4.0,
            m_stop: 1.0,
            eps_mag: 0.5,
            min_mag: 0.5,
        }
    }
}

#[inline]
fn clip01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Angle-based probability `P_a`, 0.5 exactly at `theta_th`.
pub fn angle_probability(d_a: f64, theta_th: f64) -> f64 {
    clip01(0.5 * d_a / theta_th)
}

/// Relative flow length `d_l`, floored at `eps_len`.
pub fn relative_length(mag: f64, mean_static_mag: f64, eps_len: f64) -> Result<f64> {
    if mean_static_mag <= 0.0 {
        return Err(Error::ZeroStaticFlow);
    }
    Ok((mag / mean_static_mag).max(eps_len))
}

/// Length factor `F_l = |log10(d_l)|`, capped at `fl_cap`.
pub fn length_factor(d_l: f64, fl_cap: f64) -> f64 {
    d_l.log10().abs().min(fl_cap)
}

/// FoE likelihood `P_FoE = clip[0,1](P_a + alpha * F_l)`.
pub fn foe_likelihood(p_a: f64, f_l: f64, alpha: f64) -> f64 {
    clip01(p_a + alpha * f_l)
}

/// Mean flow magnitude over valid static-area pixels above `eps_mag`.
/// Returns 0.0 when no pixel qualifies.
pub fn mean_static_magnitude(flow: &FlowField, static_area: &BinaryMask, eps_mag: f64) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for idx in 0..flow.len() {
        if static_area.get(idx) && flow.is_valid(idx) {
            let mag = flow.magnitude(idx);
            if mag > eps_mag {
                sum += mag;
                count += 1;
            }
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Per-pixel `P_FoE` map for a moving camera.
///
/// Invalid pixels, sub-threshold magnitudes, and pixels at the FoE get zero:
/// absent flow is absent evidence.
pub fn likelihood_map(
    flow: &FlowField,
    foe: &SignedFoe,
    static_area: &BinaryMask,
    params: &LikelihoodParams,
) -> Result<ProbabilityMap> {
    static_area.same_dims(flow.width(), flow.height())?;
    let mean = mean_static_magnitude(flow, static_area, params.eps_mag);
    if mean <= 0.0 {
        return Err(Error::ZeroStaticFlow);
    }

    let mut data = Vec::with_capacity(flow.len());
    for idx in 0..flow.len() {
        if !flow.is_valid(idx) {
            data.push(0.0);
            continue;
        }
        let mag = flow.magnitude(idx);
        if mag <= params.min_mag {
            data.push(0.0);
            continue;
        }
        let d_a = match angular_deviation(foe, flow.position(idx), flow.vector(idx)) {
            Ok(d_a) => d_a,
            Err(Error::AtFoe) => {
                data.push(0.0);
                continue;
            }
            Err(e) => return Err(e),
        };
        let p_a = angle_probability(d_a, params.theta_th);
        let d_l = relative_length(mag, mean, params.eps_len)?;
        let f_l = length_factor(d_l, params.fl_cap);
        data.push(foe_likelihood(p_a, f_l, params.alpha));
    }
    let mut it = data.into_iter();
    Ok(ProbabilityMap::from_fn(flow.width(), flow.height(), |_, _| {
        it.next().unwrap()
    }))
}

/// Likelihood when the camera is judged static: any flow is suspicious,
/// scaled linearly by `m_stop`.
pub fn static_camera_likelihood(flow: &FlowField, params: &LikelihoodParams) -> ProbabilityMap {
    ProbabilityMap::from_fn(flow.width(), flow.height(), |x, y| {
        let idx = flow.index(x, y);
        if flow.is_valid(idx) {
            clip01(flow.magnitude(idx) / params.m_stop)
        } else {
            0.0
        }
    })
}

/// Posterior `P_M = P_seg * P_FoE`, a plain product with no renormalization.
pub fn posterior_map(prior: &ProbabilityMap, likelihood: &ProbabilityMap) -> Result<ProbabilityMap> {
    likelihood.same_dims(prior.width(), prior.height())?;
    Ok(ProbabilityMap::from_fn(prior.width(), prior.height(), |x, y| {
        prior.at(x, y) * likelihood.at(x, y)
    }))
}
