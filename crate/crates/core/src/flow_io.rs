//! Dense optical-flow fields and the Middlebury `.flo` binary format.
//!
//! The format is a 4-byte float sentinel (202021.25, "PIEH" in ASCII),
//! 32-bit width and height, then `height * width` interleaved `(u, v)`
//! 32-bit floats, all little-endian. Pixels whose horizontal or vertical
//! component exceeds 1e9 in magnitude are "unknown" by convention and are
//! surfaced here as `valid = false`; they are written back as (1e10, 1e10).

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Sentinel value opening every `.flo` stream.
pub const FLO_MAGIC: f32 = 202021.25;
/// Components at or above this magnitude mark a pixel as unknown.
pub const UNKNOWN_FLOW_THRESHOLD: f32 = 1e9;
/// Component value written for unknown pixels.
pub const UNKNOWN_FLOW: f32 = 1e10;

const MAX_DIM: i32 = 32768;

/// Dense per-pixel motion field in pixels/frame, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    width: usize,
    height: usize,
    u: Vec<f32>,
    v: Vec<f32>,
    valid: Vec<bool>,
}

impl FlowField {
    /// All-zero field with every pixel valid.
    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width * height > 0, "flow field must be non-empty");
        Self {
            width,
            height,
            u: vec![0.0; width * height],
            v: vec![0.0; width * height],
            valid: vec![true; width * height],
        }
    }

    pub fn from_components(
        width: usize,
        height: usize,
        u: Vec<f32>,
        v: Vec<f32>,
        valid: Vec<bool>,
    ) -> Self {
        let n = width * height;
        assert!(n > 0, "flow field must be non-empty");
        assert_eq!(u.len(), n);
        assert_eq!(v.len(), n);
        assert_eq!(valid.len(), n);
        Self {
            width,
            height,
            u,
            v,
            valid,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    /// Pixel position as real coordinates, for geometry against the flow.
    #[inline]
    pub fn position(&self, idx: usize) -> (f64, f64) {
        ((idx % self.width) as f64, (idx / self.width) as f64)
    }

    #[inline]
    pub fn uv(&self, idx: usize) -> (f32, f32) {
        (self.u[idx], self.v[idx])
    }

    /// Flow vector widened to f64 for geometric computation.
    #[inline]
    pub fn vector(&self, idx: usize) -> (f64, f64) {
        (f64::from(self.u[idx]), f64::from(self.v[idx]))
    }

    #[inline]
    pub fn magnitude(&self, idx: usize) -> f64 {
        let (u, v) = self.vector(idx);
        u.hypot(v)
    }

    #[inline]
    pub fn is_valid(&self, idx: usize) -> bool {
        self.valid[idx]
    }

    pub fn set(&mut self, idx: usize, u: f32, v: f32) {
        self.u[idx] = u;
        self.v[idx] = v;
    }

    pub fn invalidate(&mut self, idx: usize) {
        self.valid[idx] = false;
    }

    /// Marks every pixel set in `mask` as invalid (e.g. sky removal).
    pub fn invalidate_where(&mut self, mask: &crate::types::BinaryMask) -> Result<()> {
        mask.same_dims(self.width, self.height)?;
        for idx in 0..self.valid.len() {
            if mask.get(idx) {
                self.valid[idx] = false;
            }
        }
        Ok(())
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&b| b).count()
    }
}

/// Reads a Middlebury `.flo` stream.
pub fn read_flo<R: Read>(mut r: R) -> Result<FlowField> {
    let mut header = [0u8; 12];
    read_exact_or_truncated(&mut r, &mut header, 12)?;

    let magic = u32::from_le_bytes(header[0..4].try_into().unwrap());
    if magic != FLO_MAGIC.to_bits() {
        return Err(Error::BadMagic { found: magic });
    }
    let width = i32::from_le_bytes(header[4..8].try_into().unwrap());
    let height = i32::from_le_bytes(header[8..12].try_into().unwrap());
    if width <= 0 || height <= 0 || width > MAX_DIM || height > MAX_DIM {
        return Err(Error::BadDims { width, height });
    }

    let (w, h) = (width as usize, height as usize);
    let n = w * h;
    let mut payload = vec![0u8; n * 8];
    read_exact_or_truncated(&mut r, &mut payload, n * 8)?;

    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    for chunk in payload.chunks_exact(8) {
        let ui = f32::from_le_bytes(chunk[0..4].try_into().unwrap());
        let vi = f32::from_le_bytes(chunk[4..8].try_into().unwrap());
        let known = ui.is_finite()
            && vi.is_finite()
            && ui.abs() <= UNKNOWN_FLOW_THRESHOLD
            && vi.abs() <= UNKNOWN_FLOW_THRESHOLD;
        u.push(if known { ui } else { 0.0 });
        v.push(if known { vi } else { 0.0 });
        valid.push(known);
    }

    Ok(FlowField {
        width: w,
        height: h,
        u,
        v,
        valid,
    })
}

fn read_exact_or_truncated<R: Read>(r: &mut R, buf: &mut [u8], expected: usize) -> Result<()> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..])? {
            0 => {
                return Err(Error::Truncated {
                    expected,
                    got: filled,
                })
            }
            n => filled += n,
        }
    }
    Ok(())
}

/// Writes the field in the exact layout `read_flo` accepts.
pub fn write_flo<W: Write>(field: &FlowField, mut w: W) -> Result<()> {
    let mut out = Vec::with_capacity(12 + field.len() * 8);
    out.extend_from_slice(&FLO_MAGIC.to_le_bytes());
    out.extend_from_slice(&(field.width as i32).to_le_bytes());
    out.extend_from_slice(&(field.height as i32).to_le_bytes());
    for idx in 0..field.len() {
        let (u, v) = if field.valid[idx] {
            field.uv(idx)
        } else {
            (UNKNOWN_FLOW, UNKNOWN_FLOW)
        };
        out.extend_from_slice(&u.to_le_bytes());
        out.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&out)?;
    Ok(())
}

/// Renders the field with the usual flow color wheel: hue from direction,
/// saturation from magnitude normalized by the 99th-percentile magnitude.
/// Zero flow comes out white, invalid pixels black. Diagnostic output only.
pub fn flow_to_color(field: &FlowField) -> image::RgbImage {
    let mut mags: Vec<f64> = (0..field.len())
        .filter(|&i| field.is_valid(i))
        .map(|i| field.magnitude(i))
        .collect();
    mags.sort_by(|a, b| a.total_cmp(b));
    let norm = if mags.is_empty() {
        1.0
    } else {
        // Nearest-rank 99th percentile, floored away from zero.
        let rank = ((mags.len() as f64 * 0.99).ceil() as usize).clamp(1, mags.len());
        mags[rank - 1].max(1e-9)
    };

    let mut img = image::RgbImage::new(field.width as u32, field.height as u32);
    for (x, y, px) in img.enumerate_pixels_mut() {
        let idx = field.index(x as usize, y as usize);
        *px = if field.is_valid(idx) {
            let (u, v) = field.vector(idx);
            let hue = v.atan2(u); // [-pi, pi]
            let sat = (field.magnitude(idx) / norm).min(1.0);
            image::Rgb(hsv_to_rgb(hue, sat, 1.0))
        } else {
            image::Rgb([0, 0, 0])
        };
    }
    img
}

/// `hue` in radians, `sat`/`val` in [0,1].
fn hsv_to_rgb(hue: f64, sat: f64, val: f64) -> [u8; 3] {
    let h = (hue.rem_euclid(std::f64::consts::TAU)) / std::f64::consts::TAU * 6.0;
    let c = val * sat;
    let x = c * (1.0 - ((h % 2.0) - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = val - c;
    [
        ((r + m) * 255.0).round() as u8,
        ((g + m) * 255.0).round() as u8,
        ((b + m) * 255.0).round() as u8,
    ]
}
