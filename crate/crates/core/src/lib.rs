//! Moving-object detection from dense optical flow and panoptic segmentation.
//!
//! Given a per-frame flow field and a panoptic label map, the pipeline:
//!
//! 1. removes sky (flow is meaningless there) and assigns each pixel a prior
//!    moving probability from a class table;
//! 2. decides whether the camera is moving from the flow present in
//!    low-prior ("static") areas;
//! 3. if it is, estimates the signed focus of expansion by RANSAC over
//!    static-area flow-vector pairs and derives a per-pixel moving
//!    likelihood from angular deviation and relative flow length;
//! 4. fuses likelihood and prior into a posterior, thresholds it, and
//!    promotes panoptic instances with enough moving pixels to wholly
//!    moving.
//!
//! A synthetic pinhole-scene generator provides exact flow, labels, moving
//! masks, and the true signed FoE for verification, and an IoU harness
//! scores predictions per frame, per scene, and per dataset.
//!
//! The crate is pure computation over immutable inputs; everything is safe
//! to call concurrently. RANSAC parallelizes internally but is bit-for-bit
//! deterministic given the same seed.

pub mod camera_motion;
pub mod config;
pub mod error;
pub mod eval;
pub mod flow_io;
pub mod foe;
pub mod likelihood;
pub mod pgm;
pub mod pipeline;
pub mod refine;
pub mod seg_prior;
pub mod synth;
pub mod types;
pub mod viz;

pub use config::Config;
pub use error::{Error, Result};
pub use flow_io::FlowField;
pub use foe::{FoeResult, FoeSign, RansacParams, SignedFoe};
pub use likelihood::LikelihoodParams;
pub use pipeline::{analyze_frame, FrameAnalysis};
pub use seg_prior::{ClassPriorTable, PanopticMap};
pub use types::{BinaryMask, ProbabilityMap};
