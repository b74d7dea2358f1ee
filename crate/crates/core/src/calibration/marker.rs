use serde::{Deserialize, Serialize};

use crate::calibration::profile::CalibrationProfile;
use crate::error::{Error, Result};
use crate::imagecore::RgbImage;

pub const DEFAULT_SEARCH_RADIUS: u32 = 20;

/// Correlation below which the marker is considered lost.
pub const MIN_MARKER_CORRELATION: f64 = 0.6;

/// Integer camera drift relative to the calibration frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameOffset {
    pub dx: i32,
    pub dy: i32,
    pub correlation: f64,
}

impl FrameOffset {
    pub const ZERO: FrameOffset = FrameOffset {
        dx: 0,
        dy: 0,
        correlation: 1.0,
    };
}

/// Find the translation of the centering marker by exhaustive normalized
/// cross-correlation of the calibration template against the frame's
/// luminance over `[-radius, radius]^2`.
///
/// Scan order is row-major from `(-radius, -radius)`; the first maximum wins.
pub fn locate_center_marker(frame: &RgbImage, profile: &CalibrationProfile, search_radius: u32) -> Result<FrameOffset> {
    let tpl = &profile.marker_template;
    let (tw, th) = (tpl.image.width(), tpl.image.height());
    let n = (tw * th) as f64;
    let mean = tpl.image.values().iter().map(|&v| v as f64).sum::<f64>() / n;
    let centered: Vec<f64> = tpl.image.values().iter().map(|&v| v as f64 - mean).collect();
    let tnorm = centered.iter().map(|v| v * v).sum::<f64>().sqrt();
    if tnorm == 0.0 {
        return Err(Error::Config("marker template has no contrast".into()));
    }

    let r = search_radius as i64;
    let (ox, oy) = tpl.origin;
    // only the luminance of the search region is needed
    let rx0 = (ox - r).max(0);
    let ry0 = (oy - r).max(0);
    let rx1 = (ox + tw as i64 + r).min(frame.width() as i64);
    let ry1 = (oy + th as i64 + r).min(frame.height() as i64);
    if rx1 <= rx0 || ry1 <= ry0 {
        return Err(Error::MarkerLost { correlation: 0.0 });
    }
    let rw = (rx1 - rx0) as usize;
    let rh = (ry1 - ry0) as usize;
    let mut region = vec![0f64; rw * rh];
    for y in 0..rh {
        for x in 0..rw {
            let p = frame.get(rx0 as usize + x, ry0 as usize + y);
            region[y * rw + x] = 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64;
        }
    }

    let mut best: Option<FrameOffset> = None;
    for dy in -r..=r {
        for dx in -r..=r {
            let wx = ox + dx - rx0;
            let wy = oy + dy - ry0;
            if wx < 0 || wy < 0 || wx as usize + tw > rw || wy as usize + th > rh {
                continue;
            }
            let (wx, wy) = (wx as usize, wy as usize);
            let (mut sw, mut sww, mut stw) = (0.0, 0.0, 0.0);
            for ty in 0..th {
                let row = &region[(wy + ty) * rw + wx..(wy + ty) * rw + wx + tw];
                let trow = &centered[ty * tw..(ty + 1) * tw];
                for (w, t) in row.iter().zip(trow) {
                    sw += w;
                    sww += w * w;
                    stw += t * w;
                }
            }
            let var = sww - sw * sw / n;
            let corr = if var > 1e-9 { stw / (tnorm * var.sqrt()) } else { 0.0 };
            if best.is_none_or(|b| corr > b.correlation) {
                best = Some(FrameOffset {
                    dx: dx as i32,
                    dy: dy as i32,
                    correlation: corr,
                });
            }
        }
    }

    match best {
        Some(b) if b.correlation >= MIN_MARKER_CORRELATION => Ok(b),
        Some(b) => Err(Error::MarkerLost {
            correlation: b.correlation,
        }),
        None => Err(Error::MarkerLost { correlation: 0.0 }),
    }
}

/// Undo a measured drift: `out(x, y) = frame(x + dx, y + dy)`, black where
/// the source falls outside the frame.
pub fn align_frame(frame: &RgbImage, offset: &FrameOffset) -> RgbImage {
    translate(frame, -offset.dx, -offset.dy)
}

/// Move image content by `(tx, ty)` pixels; vacated pixels are black.
pub fn translate(frame: &RgbImage, tx: i32, ty: i32) -> RgbImage {
    if tx == 0 && ty == 0 {
        return frame.clone();
    }
    let (w, h) = (frame.width() as i64, frame.height() as i64);
    let mut out = RgbImage::new(frame.width(), frame.height()).expect("valid dims");
    for y in 0..h {
        let sy = y - ty as i64;
        if sy < 0 || sy >= h {
            continue;
        }
        for x in 0..w {
            let sx = x - tx as i64;
            if sx < 0 || sx >= w {
                continue;
            }
            out.set(x as usize, y as usize, frame.get(sx as usize, sy as usize));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translate_then_align_restores_interior() {
        let img = RgbImage::from_fn(30, 20, |x, y| [(x * 3 + y) as f32, y as f32, 1.0]).unwrap();
        let moved = translate(&img, 3, -2);
        assert_eq!(moved.get(3, 0), img.get(0, 2));
        assert_eq!(moved.get(0, 0), [0.0; 3]);
        let back = align_frame(
            &moved,
            &FrameOffset {
                dx: 3,
                dy: -2,
                correlation: 1.0,
            },
        );
        for y in 2..18 {
            for x in 3..27 {
                assert_eq!(back.get(x, y), img.get(x, y));
            }
        }
    }

    #[test]
    fn zero_offset_is_identity() {
        let img = RgbImage::from_fn(5, 5, |x, y| [x as f32, y as f32, 0.0]).unwrap();
        assert_eq!(align_frame(&img, &FrameOffset::ZERO), img);
    }
}
