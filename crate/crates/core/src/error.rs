//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),

    // --- flow file format ---
    #[error("bad flow-file magic: expected 202021.25, found bits {found:#010x}")]
    BadMagic { found: u32 },
    #[error("truncated flow stream: expected {expected} bytes of payload, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("bad flow dimensions {width}x{height} (must be in 1..=32768)")]
    BadDims { width: i32, height: i32 },

    // --- text formats (class table, config, scene spec, pgm) ---
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    // --- class prior table ---
    #[error("duplicate class id {id} in prior table")]
    DuplicateClass { id: u16 },
    #[error("prior {prior} for class id {id} outside [0, 1]")]
    PriorOutOfRange { id: u16, prior: f64 },
    #[error("class id {id} not present in the prior table")]
    UnknownClass { id: u16 },

    // --- camera motion gate ---
    #[error("static area contains no valid flow pixels")]
    EmptyStaticArea,

    // --- focus of expansion ---
    #[error("degenerate flow pair: {reason}")]
    Degenerate { reason: &'static str },
    #[error("pixel coincides with the focus of expansion")]
    AtFoe,
    #[error("zero-length flow vector has no direction")]
    ZeroFlow,
    #[error("insufficient flow: {found} qualifying static pixels (need at least 2)")]
    InsufficientFlow { found: usize },
    #[error("no consensus: every sampled hypothesis was degenerate")]
    NoConsensus,

    // --- moving probability ---
    #[error("mean static flow magnitude is zero; camera cannot be moving")]
    ZeroStaticFlow,
    #[error("dimension mismatch: expected {expected_width}x{expected_height}, got {got_width}x{got_height}")]
    DimensionMismatch {
        expected_width: usize,
        expected_height: usize,
        got_width: usize,
        got_height: usize,
    },

    // --- evaluation ---
    #[error("scene has no frames to average")]
    EmptyScene,
    #[error("dataset has no scenes to average")]
    EmptyDataset,

    // --- synthetic scenes ---
    #[error("scene point at pixel ({x}, {y}) projects behind the camera")]
    BehindCamera { x: usize, y: usize },
    #[error("ground-truth focus of expansion is undefined under camera rotation")]
    RotationPresent,
    #[error("camera is not moving; no focus of expansion exists")]
    NoMotion,
    #[error("ground-truth focus of expansion is depth-dependent when zoom and translation combine")]
    ZoomWithTranslation,
    #[error("invalid scene: {0}")]
    InvalidScene(String),

    // --- configuration ---
    #[error("config value out of range: {key} = {value} ({constraint})")]
    ConfigOutOfRange {
        key: &'static str,
        value: f64,
        constraint: &'static str,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn dims(expected: (usize, usize), got: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            expected_width: expected.0,
            expected_height: expected.1,
            got_width: got.0,
            got_height: got.1,
        }
    }
}
