use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagecore::RgbImage;

/// Brown-Conrady lens model with two radial and two tangential terms.
///
/// Pixel coordinates follow the raster convention used across the crate:
/// pixel `(i, j)` is centered at `(i + 0.5, j + 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    #[serde(default)]
    pub k1: f64,
    #[serde(default)]
    pub k2: f64,
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
}

impl DistortionModel {
    /// Zero-coefficient model centered on a `width x height` raster.
    pub fn identity(width: usize, height: usize) -> Self {
        let f = width.max(height) as f64;
        Self {
            fx: f,
            fy: f,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
            k1: 0.0,
            k2: 0.0,
            p1: 0.0,
            p2: 0.0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.k1 == 0.0 && self.k2 == 0.0 && self.p1 == 0.0 && self.p2 == 0.0
    }

    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::Config(format!(
                "focal lengths must be positive (fx={}, fy={})",
                self.fx, self.fy
            )));
        }
        if !(0.0..=width as f64).contains(&self.cx) || !(0.0..=height as f64).contains(&self.cy) {
            return Err(Error::Config(format!(
                "principal point ({}, {}) outside {width}x{height} image",
                self.cx, self.cy
            )));
        }
        for v in [self.k1, self.k2, self.p1, self.p2] {
            if !v.is_finite() {
                return Err(Error::Config("non-finite distortion coefficient".into()));
            }
        }
        Ok(())
    }

    /// Forward model on normalized coordinates.
    pub fn distort_normalized(&self, x: f64, y: f64) -> (f64, f64) {
        let r2 = x * x + y * y;
        let radial = 1.0 + self.k1 * r2 + self.k2 * r2 * r2;
        let xd = x * radial + 2.0 * self.p1 * x * y + self.p2 * (r2 + 2.0 * x * x);
        let yd = y * radial + self.p1 * (r2 + 2.0 * y * y) + 2.0 * self.p2 * x * y;
        (xd, yd)
    }

    /// Inverse of [`Self::distort_normalized`] by fixed-point iteration.
    pub fn undistort_normalized(&self, xd: f64, yd: f64) -> (f64, f64) {
        let (mut x, mut y) = (xd, yd);
        for _ in 0..50 {
            let r2 = x * x + y * y;
            let radial = 1.0 + self.k1 * r2 + self.k2 * r2 * r2;
            let dx = 2.0 * self.p1 * x * y + self.p2 * (r2 + 2.0 * x * x);
            let dy = self.p1 * (r2 + 2.0 * y * y) + 2.0 * self.p2 * x * y;
            let (nx, ny) = ((xd - dx) / radial, (yd - dy) / radial);
            let step = (nx - x).abs() + (ny - y).abs();
            x = nx;
            y = ny;
            if step < 1e-12 {
                break;
            }
        }
        (x, y)
    }

    /// Where the ideal (undistorted) pixel position `(u, v)` lands in the raw
    /// image.
    pub fn distort_pixel(&self, u: f64, v: f64) -> (f64, f64) {
        let (xd, yd) = self.distort_normalized((u - self.cx) / self.fx, (v - self.cy) / self.fy);
        (xd * self.fx + self.cx, yd * self.fy + self.cy)
    }

    /// Ideal pixel position of the raw pixel position `(u, v)`.
    pub fn undistort_pixel(&self, u: f64, v: f64) -> (f64, f64) {
        let (x, y) = self.undistort_normalized((u - self.cx) / self.fx, (v - self.cy) / self.fy);
        (x * self.fx + self.cx, y * self.fy + self.cy)
    }
}

/// Resample a raw frame onto the ideal pinhole grid. Each output pixel center
/// is pushed through the forward model and bilinearly sampled from `raw`;
/// samples falling outside the source are black.
pub fn undistort_frame(raw: &RgbImage, model: &DistortionModel) -> RgbImage {
    if model.is_identity() {
        return raw.clone();
    }
    remap(raw, |u, v| model.distort_pixel(u, v))
}

/// Inverse of [`undistort_frame`]: render what a lens with this model would
/// record for an ideal scene.
pub fn distort_frame(ideal: &RgbImage, model: &DistortionModel) -> RgbImage {
    if model.is_identity() {
        return ideal.clone();
    }
    remap(ideal, |u, v| model.undistort_pixel(u, v))
}

fn remap(src: &RgbImage, map: impl Fn(f64, f64) -> (f64, f64)) -> RgbImage {
    let mut out = RgbImage::new(src.width(), src.height()).expect("source dims are valid");
    for y in 0..src.height() {
        for x in 0..src.width() {
            let (su, sv) = map(x as f64 + 0.5, y as f64 + 0.5);
            out.set(x, y, src.sample_bilinear(su, sv));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn barrel(w: usize, h: usize) -> DistortionModel {
        DistortionModel {
            k1: -0.2,
            k2: 0.03,
            p1: 0.001,
            p2: -0.0015,
            ..DistortionModel::identity(w, h)
        }
    }

    #[test]
    fn zero_coefficients_are_bit_exact_identity() {
        let img = RgbImage::from_fn(17, 9, |x, y| [x as f32 * 1.37, y as f32 * 3.1, 0.25]).unwrap();
        let m = DistortionModel::identity(17, 9);
        assert_eq!(undistort_frame(&img, &m), img);
    }

    #[test]
    fn principal_point_is_fixed() {
        let img = RgbImage::from_fn(41, 31, |x, y| [((x * 7 + y * 13) % 256) as f32, 0.0, 0.0]).unwrap();
        let m = DistortionModel {
            cx: 20.5,
            cy: 15.5,
            ..barrel(41, 31)
        };
        let out = undistort_frame(&img, &m);
        assert_eq!(out.get(20, 15), img.get(20, 15));
        assert_eq!(m.distort_pixel(20.5, 15.5), (20.5, 15.5));
    }

    #[test]
    fn point_round_trip() {
        let m = barrel(640, 480);
        for &(u, v) in &[(10.0, 20.0), (320.0, 240.0), (600.5, 470.25), (5.0, 400.0)] {
            let (du, dv) = m.distort_pixel(u, v);
            let (ru, rv) = m.undistort_pixel(du, dv);
            assert!((ru - u).abs() < 1e-6 && (rv - v).abs() < 1e-6, "{u},{v} -> {ru},{rv}");
        }
    }

    #[test]
    fn validation() {
        let mut m = DistortionModel::identity(100, 50);
        assert!(m.validate(100, 50).is_ok());
        m.fx = 0.0;
        assert!(m.validate(100, 50).is_err());
        let m = DistortionModel {
            cx: 150.0,
            ..DistortionModel::identity(100, 50)
        };
        assert!(m.validate(100, 50).is_err());
    }
}
