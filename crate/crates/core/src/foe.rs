//! Signed focus-of-expansion estimation via RANSAC over flow-vector pairs.
//!
//! Each hypothesis is the homogeneous intersection of the two lines extended
//! from a pair of flow vectors, together with an expansion sign: +1 when both
//! flows point away from the intersection (a source, i.e. forward motion or
//! zoom-in), -1 when both point toward it (a sink). Parallel flows yield a
//! point at infinity, which models lateral camera translation; its sign is
//! gauge-fixed to +1 with the direction taken from the flow itself.
//!
//! Pixels whose flow direction matches the expected direction from the FoE
//! within an angular threshold are inliers (camera motion); the rest are
//! outliers (candidate moving pixels).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow_io::FlowField;
use crate::types::BinaryMask;

/// Below this fraction of the homogeneous norm, the intersection counts as
/// being at infinity.
const INFINITY_EPS: f64 = 1e-12;

/// Expansion (source) or contraction (sink).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoeSign {
    Source,
    Sink,
}

impl FoeSign {
    /// +1 for a source, -1 for a sink.
    pub fn factor(self) -> f64 {
        match self {
            FoeSign::Source => 1.0,
            FoeSign::Sink => -1.0,
        }
    }
}

/// Homogeneous 2D point (allows infinity) plus expansion sign.
///
/// Canonical form: unit homogeneous norm, `hw >= 0`, and sign fixed to
/// `Source` when the point is at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedFoe {
    h: [f64; 3],
    sign: FoeSign,
}

impl SignedFoe {
    /// Finite FoE at pixel coordinates `(x, y)`.
    pub fn finite(x: f64, y: f64, sign: FoeSign) -> Self {
        let n = (x * x + y * y + 1.0).sqrt();
        Self {
            h: [x / n, y / n, 1.0 / n],
            sign,
        }
    }

    /// FoE at infinity along `(dx, dy)`; the sign gauge is fixed to `Source`.
    pub fn at_infinity(dx: f64, dy: f64) -> Self {
        let n = dx.hypot(dy);
        assert!(n > 0.0, "infinite FoE needs a nonzero direction");
        Self {
            h: [dx / n, dy / n, 0.0],
            sign: FoeSign::Source,
        }
    }

    pub fn homogeneous(&self) -> [f64; 3] {
        self.h
    }

    pub fn sign(&self) -> FoeSign {
        self.sign
    }

    pub fn is_at_infinity(&self) -> bool {
        self.h[2] == 0.0
    }

    /// Euclidean position, or `None` at infinity.
    pub fn position(&self) -> Option<(f64, f64)> {
        if self.is_at_infinity() {
            None
        } else {
            Some((self.h[0] / self.h[2], self.h[1] / self.h[2]))
        }
    }

    /// Unit direction for an FoE at infinity, or `None` when finite.
    pub fn infinite_direction(&self) -> Option<(f64, f64)> {
        if self.is_at_infinity() {
            Some((self.h[0], self.h[1]))
        } else {
            None
        }
    }
}

/// RANSAC controls. `exhaustive` replaces random sampling with enumeration of
/// every pixel pair, which only makes sense for small instances.
#[derive(Debug, Clone, Copy)]
pub struct RansacParams {
    pub iterations: usize,
    pub theta_inlier: f64,
    pub min_mag: f64,
    pub seed: u64,
    pub exhaustive: bool,
}

impl Default for RansacParams {
    fn default() -> Self {
        Self {
            iterations: 512,
            theta_inlier: std::f64::consts::FRAC_PI_6,
            min_mag: 0.5,
            seed: 0,
            exhaustive: false,
        }
    }
}

/// Winning hypothesis plus the per-pixel inlier classification.
#[derive(Debug, Clone)]
pub struct FoeResult {
    pub foe: SignedFoe,
    /// True where flow is consistent with the FoE. Sub-threshold and at-FoE
    /// pixels carry no motion evidence and default to inlier; invalid pixels
    /// are false.
    pub inlier: BinaryMask,
    /// Number of true pixels in `inlier`.
    pub support: usize,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Homogeneous line through `p` along direction `f`: `(-v, u, x*v - y*u)`.
fn flow_line(p: (f64, f64), f: (f64, f64)) -> [f64; 3] {
    [-f.1, f.0, p.0 * f.1 - p.1 * f.0]
}

/// Signed FoE hypothesis from two flow vectors.
///
/// The candidate is the intersection of the lines extended from the two
/// flows. Finite candidates take their sign from whether both flows point
/// away from (+) or toward (-) the intersection; mixed orientation has no
/// rigid-translation interpretation and is degenerate, as are anti-parallel
/// flows, coincident positions, collinear lines, and sub-threshold
/// magnitudes.
pub fn foe_from_pair(
    p1: (f64, f64),
    f1: (f64, f64),
    p2: (f64, f64),
    f2: (f64, f64),
    min_mag: f64,
) -> Result<SignedFoe> {
    if f1.0.hypot(f1.1) <= min_mag || f2.0.hypot(f2.1) <= min_mag {
        return Err(Error::Degenerate {
            reason: "flow magnitude at or below minimum",
        });
    }
    if p1 == p2 {
        return Err(Error::Degenerate {
            reason: "coincident pixel positions",
        });
    }

    let l1 = flow_line(p1, f1);
    let l2 = flow_line(p2, f2);
    let h = cross(l1, l2);
    let norm = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
    if norm == 0.0 {
        return Err(Error::Degenerate {
            reason: "collinear flow lines",
        });
    }

    if h[2].abs() < INFINITY_EPS * norm {
        // Parallel lines. Same-direction flows describe lateral translation;
        // anti-parallel flows cannot come from one rigid translation.
        if f1.0 * f2.0 + f1.1 * f2.1 > 0.0 {
            return Ok(SignedFoe::at_infinity(f1.0, f1.1));
        }
        return Err(Error::Degenerate {
            reason: "anti-parallel flows",
        });
    }

    let e = (h[0] / h[2], h[1] / h[2]);
    let d1 = f1.0 * (p1.0 - e.0) + f1.1 * (p1.1 - e.1);
    let d2 = f2.0 * (p2.0 - e.0) + f2.1 * (p2.1 - e.1);
    let sign = if d1 > 0.0 && d2 > 0.0 {
        FoeSign::Source
    } else if d1 < 0.0 && d2 < 0.0 {
        FoeSign::Sink
    } else {
        return Err(Error::Degenerate {
            reason: "mixed source/sink orientation",
        });
    };
    Ok(SignedFoe::finite(e.0, e.1, sign))
}

/// Unit flow direction expected at pixel `p` under `foe`.
pub fn expected_direction(foe: &SignedFoe, p: (f64, f64)) -> Result<(f64, f64)> {
    let s = foe.sign.factor();
    if let Some((dx, dy)) = foe.infinite_direction() {
        return Ok((s * dx, s * dy));
    }
    let (ex, ey) = foe.position().expect("finite");
    let (rx, ry) = (p.0 - ex, p.1 - ey);
    let n = rx.hypot(ry);
    if n == 0.0 {
        return Err(Error::AtFoe);
    }
    Ok((s * rx / n, s * ry / n))
}

/// Angle in `[0, pi]` between the observed flow and the expected direction.
pub fn angular_deviation(foe: &SignedFoe, p: (f64, f64), f: (f64, f64)) -> Result<f64> {
    let n = f.0.hypot(f.1);
    if n == 0.0 {
        return Err(Error::ZeroFlow);
    }
    let (dx, dy) = expected_direction(foe, p)?;
    let cos = ((dx * f.0 + dy * f.1) / n).clamp(-1.0, 1.0);
    Ok(cos.acos())
}

/// Whether one pixel's flow counts as consistent with `foe`.
///
/// Sub-threshold magnitudes and pixels at the FoE have zero expected motion
/// and carry no evidence either way, so they count as inliers.
fn pixel_is_inlier(foe: &SignedFoe, p: (f64, f64), f: (f64, f64), params: &RansacParams) -> bool {
    if f.0.hypot(f.1) <= params.min_mag {
        return true;
    }
    match angular_deviation(foe, p, f) {
        Ok(d_a) => d_a < params.theta_inlier,
        Err(Error::AtFoe) => true,
        Err(_) => false,
    }
}

/// Robustly estimates the signed FoE from static-area flow, then classifies
/// every valid pixel of the frame as inlier (camera motion) or outlier
/// (candidate moving pixel).
///
/// Hypotheses are scored by their inlier count among qualifying static
/// pixels (valid, magnitude above `min_mag`); ties keep the first hypothesis
/// attained. Given the same inputs and seed the result is identical
/// regardless of parallel scheduling.
pub fn ransac_foe(
    flow: &FlowField,
    static_area: &BinaryMask,
    params: &RansacParams,
) -> Result<FoeResult> {
    static_area.same_dims(flow.width(), flow.height())?;
    assert!(params.iterations >= 1, "need at least one iteration");
    assert!(
        params.theta_inlier > 0.0 && params.theta_inlier < std::f64::consts::PI,
        "theta_inlier out of range"
    );
    assert!(params.min_mag >= 0.0, "min_mag must be non-negative");

    let qualifying: Vec<usize> = (0..flow.len())
        .filter(|&i| static_area.get(i) && flow.is_valid(i) && flow.magnitude(i) > params.min_mag)
        .collect();
    if qualifying.len() < 2 {
        return Err(Error::InsufficientFlow {
            found: qualifying.len(),
        });
    }

    let pairs: Vec<(usize, usize)> = if params.exhaustive {
        let mut v = Vec::with_capacity(qualifying.len() * (qualifying.len() - 1) / 2);
        for i in 0..qualifying.len() {
            for j in i + 1..qualifying.len() {
                v.push((qualifying[i], qualifying[j]));
            }
        }
        v
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        (0..params.iterations)
            .map(|_| {
                let a = rng.random_range(0..qualifying.len());
                let b = loop {
                    let b = rng.random_range(0..qualifying.len());
                    if b != a {
                        break b;
                    }
                };
                (qualifying[a], qualifying[b])
            })
            .collect()
    };

    // Score hypotheses in parallel; the reduction keys on
    // (support, first-iteration-index) so scheduling cannot change the winner.
    let best = pairs
        .par_iter()
        .enumerate()
        .filter_map(|(hyp_idx, &(i, j))| {
            let foe = foe_from_pair(
                flow.position(i),
                flow.vector(i),
                flow.position(j),
                flow.vector(j),
                params.min_mag,
            )
            .ok()?;
            let support = qualifying
                .iter()
                .filter(|&&q| pixel_is_inlier(&foe, flow.position(q), flow.vector(q), params))
                .count();
            Some((support, std::cmp::Reverse(hyp_idx), foe))
        })
        .max_by_key(|&(support, rev_idx, _)| (support, rev_idx));

    let (sample_support, _, foe) = best.ok_or(Error::NoConsensus)?;
    if sample_support < 2 {
        return Err(Error::NoConsensus);
    }

    let mut inlier = BinaryMask::new(flow.width(), flow.height());
    for idx in 0..flow.len() {
        if flow.is_valid(idx) {
            inlier.set(
                idx,
                pixel_is_inlier(&foe, flow.position(idx), flow.vector(idx), params),
            );
        }
    }
    let support = inlier.count_true();
    Ok(FoeResult {
        foe,
        inlier,
        support,
    })
}
