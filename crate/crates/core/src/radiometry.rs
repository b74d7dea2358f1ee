//! Per-frame color normalization against the neutral gray patch.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::{Point, RgbImage};

/// Reference value assigned to the gray patch on every channel.
pub const GRAY_REFERENCE: f64 = 155.0;

/// Side of the square ROI sampled from the gray patch.
pub const GRAY_ROI_PX: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraySample {
    pub mean_rgb: [f64; 3],
    pub roi_center: [f64; 2],
    pub roi_size: usize,
}

/// Top-left pixel of the ROI centered at `center`.
fn roi_origin(center: Point) -> (i64, i64) {
    let half = GRAY_ROI_PX as f64 / 2.0;
    ((center.x - half).round() as i64, (center.y - half).round() as i64)
}

/// Per-channel mean of the 10x10 window centered at `gray_center`.
pub fn sample_gray(frame: &RgbImage, gray_center: Point) -> Result<GraySample> {
    let (x0, y0) = roi_origin(gray_center);
    let n = GRAY_ROI_PX as i64;
    if x0 < 0 || y0 < 0 || x0 + n > frame.width() as i64 || y0 + n > frame.height() as i64 {
        return Err(Error::Config(format!(
            "gray ROI at ({}, {}) does not fit in the {}x{} frame",
            gray_center.x,
            gray_center.y,
            frame.width(),
            frame.height()
        )));
    }
    let mut sum = [0f64; 3];
    for y in y0..y0 + n {
        for x in x0..x0 + n {
            let p = frame.get(x as usize, y as usize);
            for c in 0..3 {
                sum[c] += p[c] as f64;
            }
        }
    }
    let mean_rgb = sum.map(|s| s / (n * n) as f64);
    if let Some(channel) = mean_rgb.iter().position(|&m| m <= 0.0) {
        return Err(Error::DegenerateReference { channel });
    }
    Ok(GraySample {
        mean_rgb,
        roi_center: gray_center.into(),
        roi_size: GRAY_ROI_PX,
    })
}

/// Scale each channel by `gray / mean` and clamp to `[0, 255]`.
pub fn normalize_colors(frame: &RgbImage, sample: &GraySample, gray: f64) -> Result<RgbImage> {
    if let Some(channel) = sample.mean_rgb.iter().position(|&m| !(m > 0.0)) {
        return Err(Error::DegenerateReference { channel });
    }
    let gain = sample.mean_rgb.map(|m| (gray / m) as f32);
    let mut out = frame.clone();
    for p in out.pixels_mut() {
        for c in 0..3 {
            p[c] = (p[c] * gain[c]).clamp(0.0, 255.0);
        }
    }
    Ok(out)
}
