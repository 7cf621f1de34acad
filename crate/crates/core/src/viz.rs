//! Diagnostic renderings: jet colormaps, class palettes, inlier/outlier
//! panels, and mask overlays. PNG output only; nothing downstream consumes
//! these images.

use image::{Rgb, RgbImage};

use crate::flow_io::{flow_to_color, FlowField};
use crate::foe::FoeResult;
use crate::seg_prior::PanopticMap;
use crate::types::{BinaryMask, ProbabilityMap};

/// Standard jet colormap over [0, 1].
pub fn jet(p: f64) -> [u8; 3] {
    let v = p.clamp(0.0, 1.0) * 4.0;
    let channel = |a: f64, b: f64| ((a.min(b)).clamp(0.0, 1.0) * 255.0).round() as u8;
    [
        channel(v - 1.5, 4.5 - v),
        channel(v - 0.5, 3.5 - v),
        channel(v + 0.5, 2.5 - v),
    ]
}

pub fn probability_to_image(map: &ProbabilityMap) -> RgbImage {
    RgbImage::from_fn(map.width() as u32, map.height() as u32, |x, y| {
        Rgb(jet(map.at(x as usize, y as usize)))
    })
}

/// Deterministic per-class color (golden-angle hue walk).
pub fn class_color(class_id: u16) -> [u8; 3] {
    let hue = (class_id as f64 * 137.50776405003785).rem_euclid(360.0);
    let h = hue / 60.0;
    let x = 1.0 - ((h % 2.0) - 1.0).abs();
    let (r, g, b) = match h as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    [
        (r * 220.0 + 35.0) as u8,
        (g * 220.0 + 35.0) as u8,
        (b * 220.0 + 35.0) as u8,
    ]
}

pub fn segmentation_to_image(seg: &PanopticMap) -> RgbImage {
    RgbImage::from_fn(seg.width() as u32, seg.height() as u32, |x, y| {
        let idx = y as usize * seg.width() + x as usize;
        Rgb(class_color(seg.class(idx)))
    })
}

pub fn mask_to_image(mask: &BinaryMask) -> RgbImage {
    RgbImage::from_fn(mask.width() as u32, mask.height() as u32, |x, y| {
        if mask.at(x as usize, y as usize) {
            Rgb([255, 255, 255])
        } else {
            Rgb([0, 0, 0])
        }
    })
}

/// Green = inlier, red = outlier, black = invalid, with a cross marking a
/// finite FoE that falls inside the image.
pub fn inlier_panel(flow: &FlowField, foe: &FoeResult) -> RgbImage {
    let mut img = RgbImage::from_fn(flow.width() as u32, flow.height() as u32, |x, y| {
        let idx = flow.index(x as usize, y as usize);
        if !flow.is_valid(idx) {
            Rgb([0, 0, 0])
        } else if foe.inlier.get(idx) {
            Rgb([0, 170, 0])
        } else {
            Rgb([200, 0, 0])
        }
    });
    if let Some((ex, ey)) = foe.foe.position() {
        let (w, h) = (flow.width() as i64, flow.height() as i64);
        let (cx, cy) = (ex.round() as i64, ey.round() as i64);
        for d in -4..=4i64 {
            for (px, py) in [(cx + d, cy), (cx, cy + d)] {
                if px >= 0 && px < w && py >= 0 && py < h {
                    img.put_pixel(px as u32, py as u32, Rgb([255, 60, 60]));
                }
            }
        }
    }
    img
}

/// Final mask tinted over the flow rendering.
pub fn overlay_on_flow(flow: &FlowField, mask: &BinaryMask) -> RgbImage {
    let mut img = flow_to_color(flow);
    for (x, y, px) in img.enumerate_pixels_mut() {
        if mask.at(x as usize, y as usize) {
            px.0 = [
                ((px.0[0] as u16 + 2 * 255) / 3) as u8,
                (px.0[1] as u16 / 3) as u8,
                (px.0[2] as u16 / 3) as u8,
            ];
        }
    }
    img
}
