use std::path::Path;

use crate::error::{Error, Result};

/// RGB raster with real-valued channels on the 0-255 scale.
///
/// Values are not clamped while the frame moves through the pipeline; clamping
/// and rounding happen only in [`RgbImage::to_rgb8`].
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<[f32; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, [0.0; 3])
    }

    pub fn filled(width: usize, height: usize, rgb: [f32; 3]) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![rgb; width * height],
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f32; 3]) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [f32; 3] {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, rgb: [f32; 3]) {
        self.data[y * self.width + x] = rgb;
    }

    pub fn pixels(&self) -> &[[f32; 3]] {
        &self.data
    }

    pub fn pixels_mut(&mut self) -> &mut [[f32; 3]] {
        &mut self.data
    }

    /// One channel (0 = R, 1 = G, 2 = B) as a scalar raster.
    pub fn channel(&self, c: usize) -> ScalarImage {
        ScalarImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|p| p[c]).collect(),
        }
    }

    /// Rec. 601 luma.
    pub fn luminance(&self) -> ScalarImage {
        ScalarImage {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .map(|p| 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2])
                .collect(),
        }
    }

    /// Bilinear sample at continuous coordinates where pixel `(i, j)` has its
    /// center at `(i + 0.5, j + 0.5)`. Samples outside the raster are black.
    pub fn sample_bilinear(&self, u: f64, v: f64) -> [f32; 3] {
        let x = u - 0.5;
        let y = v - 0.5;
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = (x - x0) as f32;
        let fy = (y - y0) as f32;
        let (x0, y0) = (x0 as i64, y0 as i64);
        let mut out = [0.0f32; 3];
        for (dy, wy) in [(0, 1.0 - fy), (1, fy)] {
            if wy == 0.0 {
                continue;
            }
            for (dx, wx) in [(0, 1.0 - fx), (1, fx)] {
                if wx == 0.0 {
                    continue;
                }
                let (xi, yi) = (x0 + dx, y0 + dy);
                if xi < 0 || yi < 0 || xi >= self.width as i64 || yi >= self.height as i64 {
                    continue;
                }
                let p = self.get(xi as usize, yi as usize);
                let w = wx * wy;
                for c in 0..3 {
                    out[c] += w * p[c];
                }
            }
        }
        out
    }

    /// Clamp to [0, 255], round, and pack into an 8-bit image.
    pub fn to_rgb8(&self) -> image::RgbImage {
        let mut out = image::RgbImage::new(self.width as u32, self.height as u32);
        for (dst, src) in out.pixels_mut().zip(&self.data) {
            dst.0 = src.map(|v| v.clamp(0.0, 255.0).round() as u8);
        }
        out
    }

    pub fn from_rgb8(img: &image::RgbImage) -> Result<Self> {
        let (w, h) = (img.width() as usize, img.height() as usize);
        check_dims(w, h)?;
        Ok(Self {
            width: w,
            height: h,
            data: img.pixels().map(|p| p.0.map(f32::from)).collect(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let img = image::open(path).map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_rgb8(&img.to_rgb8())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.to_rgb8().save(path).map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Single-channel real-valued raster (luminance, gradient magnitude, ExG, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarImage {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl ScalarImage {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![0.0; width * height],
        })
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "{} values for a {width}x{height} raster",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f32) {
        self.data[y * self.width + x] = v;
    }

    /// Read with coordinates clamped to the raster (edge replication).
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> f32 {
        let x = x.clamp(0, self.width as i64 - 1) as usize;
        let y = y.clamp(0, self.height as i64 - 1) as usize;
        self.get(x, y)
    }

    pub fn values(&self) -> &[f32] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    /// Copy of the rectangle `[x0, x0 + w) x [y0, y0 + h)`, or `None` when it
    /// does not fit inside the raster.
    pub fn crop(&self, x0: i64, y0: i64, w: usize, h: usize) -> Option<ScalarImage> {
        if x0 < 0 || y0 < 0 || x0 as usize + w > self.width || y0 as usize + h > self.height {
            return None;
        }
        let (x0, y0) = (x0 as usize, y0 as usize);
        let mut data = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            data.extend_from_slice(&self.data[y * self.width + x0..y * self.width + x0 + w]);
        }
        ScalarImage::from_vec(w, h, data).ok()
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidInput(format!(
            "image dimensions must be positive, got {width}x{height}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_dims_rejected() {
        assert!(RgbImage::new(0, 3).is_err());
        assert!(ScalarImage::new(3, 0).is_err());
    }

    #[test]
    fn bilinear_at_pixel_center_is_exact() {
        let img = RgbImage::from_fn(4, 3, |x, y| [x as f32 * 10.0 + 0.3, y as f32, 7.0]).unwrap();
        for y in 0..3 {
            for x in 0..4 {
                let s = img.sample_bilinear(x as f64 + 0.5, y as f64 + 0.5);
                assert_eq!(s, img.get(x, y));
            }
        }
        // halfway between two centers
        let s = img.sample_bilinear(1.0, 0.5);
        assert!((s[0] - 5.3).abs() < 1e-5);
        assert_eq!(img.sample_bilinear(-3.0, 1.0), [0.0; 3]);
    }

    #[test]
    fn export_clamps_and_rounds() {
        let img = RgbImage::filled(1, 1, [276.8, -4.0, 10.5]).unwrap();
        assert_eq!(img.to_rgb8().get_pixel(0, 0).0, [255, 0, 11]);
    }

    #[test]
    fn crop_bounds() {
        let s = ScalarImage::from_vec(3, 2, vec![0., 1., 2., 3., 4., 5.]).unwrap();
        assert_eq!(s.crop(1, 0, 2, 2).unwrap().values(), &[1., 2., 4., 5.]);
        assert!(s.crop(2, 0, 2, 1).is_none());
        assert!(s.crop(-1, 0, 1, 1).is_none());
    }
}
