//! IoU scoring of predicted masks against ground truth.
//!
//! Scores are averaged per frame within a scene, then across scenes, so a
//! long scene does not outweigh a short one. Two empty masks score 1.0:
//! agreeing that nothing moves is a correct prediction.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pgm;
use crate::types::BinaryMask;

/// `|pred AND gt| / |pred OR gt|`; 1.0 when both masks are empty.
pub fn frame_iou(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    gt.same_dims(pred.width(), pred.height())?;
    let mut intersection = 0usize;
    let mut union = 0usize;
    for idx in 0..pred.len() {
        let (p, g) = (pred.get(idx), gt.get(idx));
        if p && g {
            intersection += 1;
        }
        if p || g {
            union += 1;
        }
    }
    if union == 0 {
        Ok(1.0)
    } else {
        Ok(intersection as f64 / union as f64)
    }
}

/// Arithmetic mean of frame scores.
pub fn scene_iou(frames: &[f64]) -> Result<f64> {
    if frames.is_empty() {
        return Err(Error::EmptyScene);
    }
    Ok(frames.iter().sum::<f64>() / frames.len() as f64)
}

/// Arithmetic mean of scene means (not pooled over frames).
pub fn dataset_iou(scenes: &[f64]) -> Result<f64> {
    if scenes.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(scenes.iter().sum::<f64>() / scenes.len() as f64)
}

/// Loads a binary mask from an 8-bit PGM or a PNG; nonzero = moving.
pub fn load_mask(path: &Path) -> Result<BinaryMask> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    if ext == "pgm" {
        let p = pgm::read_pgm(std::fs::File::open(path)?)?;
        Ok(BinaryMask::from_vec(
            p.width,
            p.height,
            p.data.iter().map(|&v| v != 0).collect(),
        ))
    } else {
        let img = image::open(path)?.to_luma8();
        let (w, h) = (img.width() as usize, img.height() as usize);
        Ok(BinaryMask::from_vec(
            w,
            h,
            img.pixels().map(|p| p.0[0] != 0).collect(),
        ))
    }
}

#[derive(Debug, Clone)]
pub struct FrameScore {
    pub frame: String,
    pub iou: f64,
}

#[derive(Debug, Clone)]
pub struct SceneScore {
    pub scene: String,
    pub frames: Vec<FrameScore>,
    pub mean: f64,
}

#[derive(Debug, Clone)]
pub struct DatasetScore {
    pub scenes: Vec<SceneScore>,
    pub mean: f64,
}

/// Reads a scene-exclusion list: one scene name per line, `#` comments.
pub fn read_scene_list(path: &Path) -> Result<BTreeSet<String>> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect())
}

fn is_mask_file(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("pgm") | Some("png")
    )
}

/// Scores `pred_dir/<scene>/<frame>.{pgm,png}` against the same layout under
/// `gt_dir`. Scenes are the sorted subdirectories of `gt_dir` minus the
/// exclusion set; every ground-truth frame must have a prediction.
pub fn evaluate_directories(
    pred_dir: &Path,
    gt_dir: &Path,
    excluded: &BTreeSet<String>,
) -> Result<DatasetScore> {
    let mut scene_names = BTreeSet::new();
    for entry in std::fs::read_dir(gt_dir)? {
        let entry = entry?;
        if entry.file_type()?.is_dir() {
            if let Some(name) = entry.file_name().to_str() {
                if !excluded.contains(name) {
                    scene_names.insert(name.to_owned());
                }
            }
        }
    }
    if scene_names.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut scenes = Vec::new();
    for scene in scene_names {
        let gt_scene = gt_dir.join(&scene);
        let mut frames: Vec<String> = std::fs::read_dir(&gt_scene)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| is_mask_file(p))
            .filter_map(|p| p.file_stem().and_then(|s| s.to_str()).map(str::to_owned))
            .collect();
        frames.sort();
        frames.dedup();
        if frames.is_empty() {
            return Err(Error::EmptyScene);
        }

        let mut scores = Vec::new();
        for frame in frames {
            let gt_path = find_mask(&gt_scene, &frame)?;
            let pred_path = find_mask(&pred_dir.join(&scene), &frame)?;
            let gt = load_mask(&gt_path)?;
            let pred = load_mask(&pred_path)?;
            scores.push(FrameScore {
                frame,
                iou: frame_iou(&pred, &gt)?,
            });
        }
        let mean = scene_iou(&scores.iter().map(|f| f.iou).collect::<Vec<_>>())?;
        scenes.push(SceneScore {
            scene,
            frames: scores,
            mean,
        });
    }
    let mean = dataset_iou(&scenes.iter().map(|s| s.mean).collect::<Vec<_>>())?;
    Ok(DatasetScore { scenes, mean })
}

fn find_mask(dir: &Path, stem: &str) -> Result<std::path::PathBuf> {
    for ext in ["pgm", "png"] {
        let p = dir.join(format!("{stem}.{ext}"));
        if p.exists() {
            return Ok(p);
        }
    }
    Err(Error::Io(std::io::Error::new(
        std::io::ErrorKind::NotFound,
        format!("no mask {stem}.pgm or {stem}.png in {}", dir.display()),
    )))
}

/// Emits `scene,frame,iou` rows, a `mean` row per scene, and a final
/// dataset-mean summary row.
pub fn write_csv<W: Write>(report: &DatasetScore, mut w: W) -> Result<()> {
    writeln!(w, "scene,frame,iou")?;
    for scene in &report.scenes {
        for frame in &scene.frames {
            writeln!(w, "{},{},{:.6}", scene.scene, frame.frame, frame.iou)?;
        }
        writeln!(w, "{},mean,{:.6}", scene.scene, scene.mean)?;
    }
    writeln!(w, "all,mean,{:.6}", report.mean)?;
    Ok(())
}
