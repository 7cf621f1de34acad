//! Synthetic-scene generator: exact flow fields, panoptic maps, moving masks,
//! and the true signed FoE for pinhole cameras over simple depth scenes.
//!
//! Per pixel, the renderer back-projects to the 3D point at that pixel's
//! depth, applies the inverse camera motion (small-angle rotation) plus the
//! owning object's velocity, applies the zoom to the intrinsics, and
//! re-projects; the flow is the reprojection displacement. Objects are
//! billboards: axis-aligned image rects at a fixed depth, so the flow stays
//! closed-form and the ground-truth moving mask is exact.

use std::path::Path;

use crate::error::{Error, Result};
use crate::flow_io::FlowField;
use crate::foe::{FoeSign, SignedFoe};
use crate::seg_prior::PanopticMap;
use crate::types::BinaryMask;

/// Pinhole intrinsics plus a per-frame multiplicative focal change.
#[derive(Debug, Clone, Copy)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    /// Focal multiplier applied between the two frames; 1.0 = no zoom.
    pub zoom_rate: f64,
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<()> {
        let ok = self.fx > 0.0
            && self.fy > 0.0
            && self.cx >= 0.0
            && self.cx < self.width as f64
            && self.cy >= 0.0
            && self.cy < self.height as f64
            && self.zoom_rate > 0.0
            && self.width > 0
            && self.height > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidScene(format!("bad intrinsics: {self:?}")))
        }
    }
}

/// Camera translation (scene units/frame) and small-angle rotation rates
/// (radians/frame).
#[derive(Debug, Clone, Copy, Default)]
pub struct CameraMotion {
    pub translation: [f64; 3],
    pub rotation: [f64; 3],
}

impl CameraMotion {
    pub fn is_translating(&self) -> bool {
        self.translation.iter().any(|&t| t != 0.0)
    }

    pub fn is_rotating(&self) -> bool {
        self.rotation.iter().any(|&w| w != 0.0)
    }
}

/// Background depth model.
#[derive(Debug, Clone, Copy)]
pub enum Background {
    /// Fronto-parallel plane at constant depth.
    Plane { depth: f64 },
    /// Depth linear in image x, from `left` at x=0 to `right` at x=width-1.
    Ramp { left: f64, right: f64 },
}

impl Background {
    fn depth_at(&self, x: usize, width: usize) -> f64 {
        match *self {
            Background::Plane { depth } => depth,
            Background::Ramp { left, right } => {
                if width <= 1 {
                    left
                } else {
                    left + (right - left) * x as f64 / (width - 1) as f64
                }
            }
        }
    }

    fn min_depth(&self) -> f64 {
        match *self {
            Background::Plane { depth } => depth,
            Background::Ramp { left, right } => left.min(right),
        }
    }
}

/// Axis-aligned image rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }
}

/// Billboard object: an image rect at a reference depth with its own velocity.
#[derive(Debug, Clone)]
pub struct SceneObject {
    pub rect: Rect,
    pub depth: f64,
    pub class_id: u16,
    pub instance_id: u16,
    /// Scene units/frame; nonzero means the object is truly moving.
    pub velocity: [f64; 3],
}

/// Scene description consumed by the renderer.
#[derive(Debug, Clone)]
pub struct SceneSpec {
    pub background: Background,
    pub background_class: u16,
    pub objects: Vec<SceneObject>,
    /// Rects where the flow is marked invalid, modelling flow-estimator
    /// failure on textureless surfaces.
    pub holes: Vec<Rect>,
}

impl SceneSpec {
    fn validate(&self, intr: &CameraIntrinsics) -> Result<()> {
        if self.background.min_depth() <= 0.0 {
            return Err(Error::InvalidScene("background depth must be > 0".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for obj in &self.objects {
            if obj.depth <= 0.0 {
                return Err(Error::InvalidScene(format!(
                    "object instance {} has depth {} <= 0",
                    obj.instance_id, obj.depth
                )));
            }
            if obj.instance_id == 0 {
                return Err(Error::InvalidScene("object instance ids must be > 0".into()));
            }
            if !seen.insert(obj.instance_id) {
                return Err(Error::InvalidScene(format!(
                    "duplicate object instance id {}",
                    obj.instance_id
                )));
            }
            let r = obj.rect;
            if r.w == 0 || r.h == 0 || r.x + r.w > intr.width || r.y + r.h > intr.height {
                return Err(Error::InvalidScene(format!(
                    "object instance {} rect {:?} outside {}x{}",
                    obj.instance_id, r, intr.width, intr.height
                )));
            }
        }
        Ok(())
    }
}

/// Everything the renderer knows about one frame.
#[derive(Debug, Clone)]
pub struct RenderedFrame {
    pub flow: FlowField,
    pub seg: PanopticMap,
    /// True exactly where the pixel belongs to an object with nonzero
    /// velocity relative to the static scene.
    pub gt_moving: BinaryMask,
}

/// Full description parsed from a scene file.
#[derive(Debug, Clone)]
pub struct Scene {
    pub intrinsics: CameraIntrinsics,
    pub motion: CameraMotion,
    pub spec: SceneSpec,
}

/// Renders the exact flow field, panoptic map, and ground-truth moving mask.
pub fn render_flow(
    spec: &SceneSpec,
    intr: &CameraIntrinsics,
    motion: &CameraMotion,
) -> Result<RenderedFrame> {
    intr.validate()?;
    spec.validate(intr)?;

    let (w, h) = (intr.width, intr.height);
    let mut flow = FlowField::zeros(w, h);
    let mut seg = PanopticMap::uniform(w, h, spec.background_class);
    let mut gt = BinaryMask::new(w, h);

    let t = motion.translation;
    let om = motion.rotation;
    let fx1 = intr.fx * intr.zoom_rate;
    let fy1 = intr.fy * intr.zoom_rate;

    for y in 0..h {
        for x in 0..w {
            let idx = y * w + x;

            // Topmost object wins; later objects draw over earlier ones.
            let owner = spec
                .objects
                .iter()
                .rev()
                .find(|obj| obj.rect.contains(x, y));
            let (depth, velocity) = match owner {
                Some(obj) => {
                    seg.set(idx, obj.class_id, obj.instance_id);
                    let moving = obj.velocity.iter().any(|&v| v != 0.0);
                    gt.set(idx, moving);
                    (obj.depth, obj.velocity)
                }
                None => (spec.background.depth_at(x, w), [0.0; 3]),
            };

            // Back-project at this pixel's depth.
            let px = (x as f64 - intr.cx) * depth / intr.fx;
            let py = (y as f64 - intr.cy) * depth / intr.fy;
            let p = [px, py, depth];

            // World motion of the point minus camera translation, then the
            // inverse small-angle rotation: p' = (I - [w]x)(p + v - t).
            let q = [
                p[0] + velocity[0] - t[0],
                p[1] + velocity[1] - t[1],
                p[2] + velocity[2] - t[2],
            ];
            let p1 = [
                q[0] - (om[1] * q[2] - om[2] * q[1]),
                q[1] - (om[2] * q[0] - om[0] * q[2]),
                q[2] - (om[0] * q[1] - om[1] * q[0]),
            ];
            if p1[2] <= 0.0 {
                return Err(Error::BehindCamera { x, y });
            }

            let x1 = fx1 * p1[0] / p1[2] + intr.cx;
            let y1 = fy1 * p1[1] / p1[2] + intr.cy;
            flow.set(idx, (x1 - x as f64) as f32, (y1 - y as f64) as f32);
        }
    }

    for hole in &spec.holes {
        for y in hole.y..(hole.y + hole.h).min(h) {
            for x in hole.x..(hole.x + hole.w).min(w) {
                flow.invalidate(y * w + x);
            }
        }
    }

    Ok(RenderedFrame {
        flow,
        seg,
        gt_moving: gt,
    })
}

/// Classical FoE of the camera motion alone.
///
/// Defined for pure translation (the projection of the translation
/// direction) and for pure zoom (the principal point). Rotation bends flow
/// lines away from any single intersection point, and combined zoom +
/// translation makes the intersection depth-dependent; both are errors.
pub fn ground_truth_foe(intr: &CameraIntrinsics, motion: &CameraMotion) -> Result<SignedFoe> {
    if motion.is_rotating() {
        return Err(Error::RotationPresent);
    }
    let zooming = intr.zoom_rate != 1.0;
    let [tx, ty, tz] = motion.translation;
    if motion.is_translating() && zooming {
        return Err(Error::ZoomWithTranslation);
    }
    if !motion.is_translating() && !zooming {
        return Err(Error::NoMotion);
    }

    if zooming {
        let sign = if intr.zoom_rate > 1.0 {
            FoeSign::Source
        } else {
            FoeSign::Sink
        };
        return Ok(SignedFoe::finite(intr.cx, intr.cy, sign));
    }
    if tz != 0.0 {
        let sign = if tz > 0.0 { FoeSign::Source } else { FoeSign::Sink };
        Ok(SignedFoe::finite(
            intr.fx * tx / tz + intr.cx,
            intr.fy * ty / tz + intr.cy,
            sign,
        ))
    } else {
        // Lateral translation: parallel flow opposite the camera motion.
        Ok(SignedFoe::at_infinity(-intr.fx * tx, -intr.fy * ty))
    }
}

// --- scene file parsing ------------------------------------------------

/// Parses the line-oriented scene format:
///
/// ```text
/// size 64 48
/// intrinsics 60 60 32 24      # fx fy cx cy
/// zoom 1.0                    # optional
/// translate 0 0 0.5           # optional camera translation
/// rotate 0 0 0                # optional rotation rates (rad/frame)
/// plane 10                    # or: ramp 5 20
/// background_class 151        # optional, default 151 (road)
/// object 40 18 12 10 5 3 1 0 0 0   # x y w h depth class inst vx vy vz
/// hole 42 20 4 4              # optional flow-estimator failure patch
/// ```
pub fn parse_scene(text: &str) -> Result<Scene> {
    let mut size: Option<(usize, usize)> = None;
    let mut intr: Option<(f64, f64, f64, f64)> = None;
    let mut zoom = 1.0f64;
    let mut translate = [0.0f64; 3];
    let mut rotate = [0.0f64; 3];
    let mut background: Option<Background> = None;
    let mut background_class: u16 = 151;
    let mut objects = Vec::new();
    let mut holes = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let keyword = tokens.next().unwrap();
        let args: Vec<&str> = tokens.collect();
        match keyword {
            "size" => {
                let v = parse_args::<usize>(&args, 2, line, "size W H")?;
                size = Some((v[0], v[1]));
            }
            "intrinsics" => {
                let v = parse_args::<f64>(&args, 4, line, "intrinsics FX FY CX CY")?;
                intr = Some((v[0], v[1], v[2], v[3]));
            }
            "zoom" => {
                zoom = parse_args::<f64>(&args, 1, line, "zoom RATE")?[0];
            }
            "translate" => {
                let v = parse_args::<f64>(&args, 3, line, "translate TX TY TZ")?;
                translate = [v[0], v[1], v[2]];
            }
            "rotate" => {
                let v = parse_args::<f64>(&args, 3, line, "rotate WX WY WZ")?;
                rotate = [v[0], v[1], v[2]];
            }
            "plane" => {
                let v = parse_args::<f64>(&args, 1, line, "plane DEPTH")?;
                background = Some(Background::Plane { depth: v[0] });
            }
            "ramp" => {
                let v = parse_args::<f64>(&args, 2, line, "ramp LEFT RIGHT")?;
                background = Some(Background::Ramp {
                    left: v[0],
                    right: v[1],
                });
            }
            "background_class" => {
                background_class = parse_args::<u16>(&args, 1, line, "background_class ID")?[0];
            }
            "object" => {
                if args.len() != 10 {
                    return Err(Error::parse(
                        line,
                        "object X Y W H DEPTH CLASS INST VX VY VZ",
                    ));
                }
                let rect = Rect {
                    x: parse_one(args[0], line)?,
                    y: parse_one(args[1], line)?,
                    w: parse_one(args[2], line)?,
                    h: parse_one(args[3], line)?,
                };
                objects.push(SceneObject {
                    rect,
                    depth: parse_one(args[4], line)?,
                    class_id: parse_one(args[5], line)?,
                    instance_id: parse_one(args[6], line)?,
                    velocity: [
                        parse_one(args[7], line)?,
                        parse_one(args[8], line)?,
                        parse_one(args[9], line)?,
                    ],
                });
            }
            "hole" => {
                let v = parse_args::<usize>(&args, 4, line, "hole X Y W H")?;
                holes.push(Rect {
                    x: v[0],
                    y: v[1],
                    w: v[2],
                    h: v[3],
                });
            }
            other => {
                return Err(Error::parse(line, format!("unknown directive `{other}`")));
            }
        }
    }

    let (width, height) =
        size.ok_or_else(|| Error::InvalidScene("missing `size` directive".into()))?;
    let (fx, fy, cx, cy) =
        intr.ok_or_else(|| Error::InvalidScene("missing `intrinsics` directive".into()))?;
    let background =
        background.ok_or_else(|| Error::InvalidScene("missing `plane` or `ramp` directive".into()))?;

    Ok(Scene {
        intrinsics: CameraIntrinsics {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
            zoom_rate: zoom,
        },
        motion: CameraMotion {
            translation: translate,
            rotation: rotate,
        },
        spec: SceneSpec {
            background,
            background_class,
            objects,
            holes,
        },
    })
}

pub fn parse_scene_file(path: &Path) -> Result<Scene> {
    parse_scene(&std::fs::read_to_string(path)?)
}

fn parse_one<T: std::str::FromStr>(token: &str, line: usize) -> Result<T> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("bad value `{token}`")))
}

fn parse_args<T: std::str::FromStr>(
    args: &[&str],
    n: usize,
    line: usize,
    usage: &str,
) -> Result<Vec<T>> {
    if args.len() != n {
        return Err(Error::parse(line, format!("expected `{usage}`")));
    }
    args.iter().map(|a| parse_one(a, line)).collect()
}
