//! Frame-level orchestration: sky removal, prior, camera-motion gate, FoE
//! estimation, likelihood fusion, and object refinement, plus diagnostic
//! output writing.

use std::path::Path;

use crate::camera_motion::{flow_existing_ratio, is_camera_moving};
use crate::config::Config;
use crate::error::Result;
use crate::flow_io::{flow_to_color, FlowField};
use crate::foe::{ransac_foe, FoeResult};
use crate::likelihood::{likelihood_map, posterior_map, static_camera_likelihood};
use crate::refine::{object_mask, pixel_mask};
use crate::seg_prior::{prior_map, sky_mask, static_mask, ClassPriorTable, PanopticMap};
use crate::types::{BinaryMask, ProbabilityMap};
use crate::viz;
use crate::{eval, pgm};

/// Every intermediate and final product of one frame.
#[derive(Debug, Clone)]
pub struct FrameAnalysis {
    /// Input flow with sky pixels invalidated.
    pub flow: FlowField,
    pub sky: BinaryMask,
    pub prior: ProbabilityMap,
    pub static_area: BinaryMask,
    pub flow_ratio: f64,
    pub camera_moving: bool,
    /// Present only on the moving-camera path.
    pub foe: Option<FoeResult>,
    pub likelihood: ProbabilityMap,
    pub posterior: ProbabilityMap,
    pub pixel_mask: BinaryMask,
    pub object_mask: BinaryMask,
}

/// Runs the full per-frame pipeline.
pub fn analyze_frame(
    flow: &FlowField,
    seg: &PanopticMap,
    table: &ClassPriorTable,
    cfg: &Config,
) -> Result<FrameAnalysis> {
    cfg.validate()?;
    seg.same_dims(flow.width(), flow.height())?;

    let mut flow = flow.clone();
    let sky = sky_mask(seg, table)?;
    flow.invalidate_where(&sky)?;

    let prior = prior_map(seg, table)?;
    let static_area = static_mask(&prior, cfg.tau_static);

    let flow_ratio = flow_existing_ratio(&flow, &static_area, cfg.eps_mag)?;
    let camera_moving = is_camera_moving(flow_ratio, cfg.tau_move);

    let (foe, likelihood) = if camera_moving {
        let result = ransac_foe(&flow, &static_area, &cfg.ransac_params())?;
        let lik = likelihood_map(&flow, &result.foe, &static_area, &cfg.likelihood_params())?;
        (Some(result), lik)
    } else {
        (None, static_camera_likelihood(&flow, &cfg.likelihood_params()))
    };

    let posterior = posterior_map(&prior, &likelihood)?;
    let pixels = pixel_mask(&posterior, cfg.tau_pixel);
    let objects = object_mask(&pixels, seg, cfg.tau_obj)?;

    Ok(FrameAnalysis {
        flow,
        sky,
        prior,
        static_area,
        flow_ratio,
        camera_moving,
        foe,
        likelihood,
        posterior,
        pixel_mask: pixels,
        object_mask: objects,
    })
}

fn write_mask_pgm(mask: &BinaryMask, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = mask.data().iter().map(|&b| if b { 255 } else { 0 }).collect();
    pgm::write_pgm8(
        std::fs::File::create(path)?,
        mask.width(),
        mask.height(),
        &bytes,
    )
}

fn write_prob_pgm(map: &ProbabilityMap, path: &Path) -> Result<()> {
    pgm::write_pgm8(
        std::fs::File::create(path)?,
        map.width(),
        map.height(),
        &map.to_bytes(),
    )
}

/// Writes the final object-level mask as `<stem>.mask.pgm`; with
/// `diagnostics`, also writes every intermediate panel.
pub fn write_outputs(
    analysis: &FrameAnalysis,
    seg: &PanopticMap,
    out_dir: &Path,
    stem: &str,
    diagnostics: bool,
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    write_mask_pgm(&analysis.object_mask, &out_dir.join(format!("{stem}.mask.pgm")))?;
    if !diagnostics {
        return Ok(());
    }

    viz::segmentation_to_image(seg).save(out_dir.join(format!("{stem}.seg.png")))?;
    viz::probability_to_image(&analysis.prior).save(out_dir.join(format!("{stem}.prior.png")))?;
    flow_to_color(&analysis.flow).save(out_dir.join(format!("{stem}.flow.png")))?;
    if let Some(foe) = &analysis.foe {
        viz::inlier_panel(&analysis.flow, foe).save(out_dir.join(format!("{stem}.inliers.png")))?;
    }
    viz::probability_to_image(&analysis.likelihood)
        .save(out_dir.join(format!("{stem}.likelihood.png")))?;
    viz::probability_to_image(&analysis.posterior)
        .save(out_dir.join(format!("{stem}.posterior.png")))?;
    write_prob_pgm(&analysis.posterior, &out_dir.join(format!("{stem}.posterior.pgm")))?;
    write_mask_pgm(&analysis.pixel_mask, &out_dir.join(format!("{stem}.pixels.pgm")))?;
    viz::mask_to_image(&analysis.object_mask).save(out_dir.join(format!("{stem}.mask.png")))?;
    viz::overlay_on_flow(&analysis.flow, &analysis.object_mask)
        .save(out_dir.join(format!("{stem}.overlay.png")))?;
    Ok(())
}

/// End-to-end IoU of a frame analysis against a ground-truth mask.
pub fn score_against(analysis: &FrameAnalysis, gt: &BinaryMask) -> Result<f64> {
    eval::frame_iou(&analysis.object_mask, gt)
}
