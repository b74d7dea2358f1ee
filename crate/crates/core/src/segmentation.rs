//! Plant-tissue segmentation: unsharp masking, Sobel gradient on the green
//! channel, Otsu split of the gradient into uniform blobs, and blob-mean
//! excess-green classification restricted to each replicate mask.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::calibration::{CalibrationProfile, ReplicateId};
use crate::error::{Error, Result};
use crate::imagecore::{label_blobs_with, otsu_threshold, BinaryMask, BlobSet, Connectivity, RgbImage, ScalarImage};

/// Per-pixel `2G - R - B`, range [-510, 510].
pub type ExgMap = ScalarImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentationConfig {
    /// Gaussian sigma of the unsharp mask, in pixels.
    pub sharpen_radius: f64,
    pub sharpen_amount: f64,
    pub t_exg: f64,
    pub min_blob_px: usize,
    /// Classify pixels individually instead of by blob mean.
    pub pixel_level_exg: bool,
    /// Re-admit gradient-rejected pixels that touch a green blob and are
    /// themselves green.
    pub rim_recovery: bool,
    /// Re-label the green pixels of blobs that fail the mean test and keep
    /// the pieces of at least `min_blob_px`.
    pub split_mixed_blobs: bool,
    /// Neighborhood used when labeling gradient blobs.
    pub connectivity: Connectivity,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self {
            sharpen_radius: 1.0,
            sharpen_amount: 0.8,
            t_exg: 25.0,
            min_blob_px: 25,
            pixel_level_exg: false,
            rim_recovery: true,
            split_mixed_blobs: true,
            connectivity: Connectivity::Eight,
        }
    }
}

/// Green pixels of one replicate at one acquisition.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenPixelMask {
    pub camera: String,
    pub replicate: ReplicateId,
    /// Hours since sowing.
    pub t: f64,
    pub mask: BinaryMask,
}

fn gaussian_kernel(sigma: f64) -> Vec<f32> {
    let half = (3.0 * sigma).ceil().max(1.0) as i64;
    let mut k: Vec<f64> = (-half..=half)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k.into_iter().map(|v| v as f32).collect()
}

/// Separable Gaussian blur with edge replication.
pub fn gaussian_blur(img: &ScalarImage, sigma: f64) -> ScalarImage {
    let k = gaussian_kernel(sigma);
    let half = (k.len() / 2) as i64;
    let (w, h) = (img.width(), img.height());
    let mut tmp = ScalarImage::new(w, h).expect("valid dims");
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0f32;
            for (i, &kv) in k.iter().enumerate() {
                acc += kv * img.get_clamped(x as i64 + i as i64 - half, y as i64);
            }
            tmp.set(x, y, acc);
        }
    }
    let mut out = ScalarImage::new(w, h).expect("valid dims");
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0f32;
            for (i, &kv) in k.iter().enumerate() {
                acc += kv * tmp.get_clamped(x as i64, y as i64 + i as i64 - half);
            }
            out.set(x, y, acc);
        }
    }
    out
}

/// `input + amount * (input - blur(input))` on one channel.
pub fn unsharp_channel(img: &ScalarImage, radius: f64, amount: f64) -> ScalarImage {
    if amount == 0.0 {
        return img.clone();
    }
    let blurred = gaussian_blur(img, radius);
    let a = amount as f32;
    let mut out = img.clone();
    for (o, b) in out.values_mut().iter_mut().zip(blurred.values()) {
        *o += a * (*o - b);
    }
    out
}

/// Unsharp masking on every channel. Values are left unclamped.
pub fn unsharp_sharpen(frame: &RgbImage, radius: f64, amount: f64) -> RgbImage {
    if amount == 0.0 {
        return frame.clone();
    }
    let chans: Vec<ScalarImage> = (0..3)
        .map(|c| unsharp_channel(&frame.channel(c), radius, amount))
        .collect();
    let mut out = frame.clone();
    for (i, p) in out.pixels_mut().iter_mut().enumerate() {
        for c in 0..3 {
            p[c] = chans[c].values()[i];
        }
    }
    out
}

/// Sobel gradient magnitude of a scalar raster, edges replicated.
pub fn sobel_magnitude(img: &ScalarImage) -> ScalarImage {
    let (w, h) = (img.width(), img.height());
    let mut out = ScalarImage::new(w, h).expect("valid dims");
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let p = |dx: i64, dy: i64| img.get_clamped(x + dx, y + dy);
            let gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            out.set(x as usize, y as usize, (gx * gx + gy * gy).sqrt());
        }
    }
    out
}

/// Sobel gradient magnitude of the green channel only.
pub fn green_gradient(frame: &RgbImage) -> ScalarImage {
    sobel_magnitude(&frame.channel(1))
}

/// Keep pixels whose gradient is at or below the Otsu threshold of the map.
pub fn gradient_blob_mask(gradient: &ScalarImage) -> Result<BinaryMask> {
    let t = otsu_threshold(gradient.values())? as f32;
    Ok(BinaryMask::from_fn(gradient.width(), gradient.height(), |x, y| {
        gradient.get(x, y) <= t
    }))
}

/// [`gradient_blob_mask`] with the threshold computed from the pixels in
/// `region` only. Pixels outside `region` are never kept, so bench edges,
/// tray rims and fixtures cannot drag the threshold up.
pub fn gradient_blob_mask_within(gradient: &ScalarImage, region: &BinaryMask) -> Result<BinaryMask> {
    if (region.width(), region.height()) != (gradient.width(), gradient.height()) {
        return Err(Error::InvalidInput("region and gradient sizes differ".into()));
    }
    let samples: Vec<f32> = region
        .set_pixels()
        .map(|(x, y)| gradient.get(x as usize, y as usize))
        .collect();
    let t = otsu_threshold(&samples)? as f32;
    Ok(BinaryMask::from_fn(gradient.width(), gradient.height(), |x, y| {
        region.get(x, y) && gradient.get(x, y) <= t
    }))
}

pub fn exg(frame: &RgbImage) -> ExgMap {
    let v = frame.pixels().iter().map(|p| 2.0 * p[1] - p[0] - p[2]).collect();
    ScalarImage::from_vec(frame.width(), frame.height(), v).expect("dims match")
}

/// Mean ExG of every blob.
pub fn blob_mean_exg(blobs: &BlobSet, exg: &ExgMap) -> Vec<f64> {
    blobs
        .blobs()
        .iter()
        .map(|b| {
            let s: f64 = b
                .pixels
                .iter()
                .map(|&(x, y)| exg.get(x as usize, y as usize) as f64)
                .sum();
            s / b.area_px() as f64
        })
        .collect()
}

/// Frame-wide union of the blobs whose mean ExG exceeds `t_exg`.
pub fn green_blob_union(blobs: &BlobSet, exg: &ExgMap, t_exg: f64) -> BinaryMask {
    let mut m = BinaryMask::new(blobs.width(), blobs.height());
    for (b, mean) in blobs.blobs().iter().zip(blob_mean_exg(blobs, exg)) {
        if mean > t_exg {
            for &(x, y) in &b.pixels {
                m.set(x as usize, y as usize, true);
            }
        }
    }
    m
}

/// Green pieces of the blobs that fail the mean test.
///
/// A thin soil sliver between two touching plants has almost no Sobel
/// response (the kernel taps on either side see plant), so the plants can
/// end up in the same blob as the surrounding soil and be rejected with it.
/// Labeling the above-threshold pixels of each rejected blob on their own
/// recovers them; soil speckle stays below `min_blob_px`.
pub fn split_mixed_blobs(
    blobs: &BlobSet,
    exg: &ExgMap,
    t_exg: f64,
    min_blob_px: usize,
    connectivity: Connectivity,
) -> BinaryMask {
    let t = t_exg as f32;
    let mut candidates = BinaryMask::new(blobs.width(), blobs.height());
    for (b, mean) in blobs.blobs().iter().zip(blob_mean_exg(blobs, exg)) {
        if mean > t_exg {
            continue;
        }
        for &(x, y) in &b.pixels {
            if exg.get(x as usize, y as usize) > t {
                candidates.set(x as usize, y as usize, true);
            }
        }
    }
    let pieces = label_blobs_with(&candidates, min_blob_px, connectivity);
    let mut out = BinaryMask::new(blobs.width(), blobs.height());
    for b in pieces.blobs() {
        for &(x, y) in &b.pixels {
            out.set(x as usize, y as usize, true);
        }
    }
    out
}

/// GreenP of one replicate: green blobs intersected with the replicate mask.
pub fn green_pixels(blobs: &BlobSet, exg: &ExgMap, mask_r: &BinaryMask, t_exg: f64) -> Result<BinaryMask> {
    green_blob_union(blobs, exg, t_exg).and(mask_r)
}

/// Grow `green` into pixels that belong to no surviving blob and have
/// ExG above `t_exg`, following 8-connectivity.
///
/// The gradient filter strips a band around every plant; this puts the
/// plant-colored part of that band back without touching soil blobs.
pub fn recover_rims(green: &BinaryMask, blobs: &BlobSet, exg: &ExgMap, t_exg: f64) -> BinaryMask {
    let (w, h) = (green.width(), green.height());
    let mut out = green.clone();
    let t = t_exg as f32;
    let mut queue: VecDeque<(usize, usize)> = green.set_pixels().map(|(x, y)| (x as usize, y as usize)).collect();
    while let Some((x, y)) = queue.pop_front() {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if out.get(nx, ny) || blobs.label_at(nx, ny).is_some() || exg.get(nx, ny) <= t {
                    continue;
                }
                out.set(nx, ny, true);
                queue.push_back((nx, ny));
            }
        }
    }
    out
}

/// Frame-level intermediates, useful for inspection and plotting.
#[derive(Debug, Clone)]
pub struct FrameSegmentation {
    pub gradient: ScalarImage,
    pub blobs: BlobSet,
    pub exg: ExgMap,
    /// Green pixels over the whole frame, before replicate masking.
    pub green: BinaryMask,
}

pub fn segment_green(frame: &RgbImage, cfg: &SegmentationConfig) -> Result<FrameSegmentation> {
    segment(frame, None, cfg)
}

/// [`segment_green`] restricted to `region`, which also bounds the pixels
/// the gradient threshold is computed from.
pub fn segment_green_within(
    frame: &RgbImage,
    region: &BinaryMask,
    cfg: &SegmentationConfig,
) -> Result<FrameSegmentation> {
    segment(frame, Some(region), cfg)
}

fn segment(frame: &RgbImage, region: Option<&BinaryMask>, cfg: &SegmentationConfig) -> Result<FrameSegmentation> {
    let sharp_green = unsharp_channel(&frame.channel(1), cfg.sharpen_radius, cfg.sharpen_amount);
    let gradient = sobel_magnitude(&sharp_green);
    let uniform = match region {
        Some(r) => gradient_blob_mask_within(&gradient, r)?,
        None => gradient_blob_mask(&gradient)?,
    };
    let blobs = label_blobs_with(&uniform, cfg.min_blob_px, cfg.connectivity);
    let exg = exg(frame);
    let green = if cfg.pixel_level_exg {
        let t = cfg.t_exg as f32;
        BinaryMask::from_fn(frame.width(), frame.height(), |x, y| exg.get(x, y) > t)
    } else {
        let mut union = green_blob_union(&blobs, &exg, cfg.t_exg);
        if cfg.split_mixed_blobs {
            union = union.or(&split_mixed_blobs(
                &blobs,
                &exg,
                cfg.t_exg,
                cfg.min_blob_px,
                cfg.connectivity,
            ))?;
        }
        if cfg.rim_recovery {
            recover_rims(&union, &blobs, &exg, cfg.t_exg)
        } else {
            union
        }
    };
    Ok(FrameSegmentation {
        gradient,
        blobs,
        exg,
        green,
    })
}

/// Segment a normalized, aligned frame into one GreenP mask per replicate.
/// The gradient threshold comes from the union of the replicate masks.
pub fn segment_frame(
    frame: &RgbImage,
    profile: &CalibrationProfile,
    t: f64,
    cfg: &SegmentationConfig,
) -> Result<Vec<GreenPixelMask>> {
    let mut region = BinaryMask::new(frame.width(), frame.height());
    for m in profile.replicate_masks.values() {
        for (x, y) in m.set_pixels() {
            region.set(x as usize, y as usize, true);
        }
    }
    let seg = segment_green_within(frame, &region, cfg)?;
    profile
        .replicate_masks
        .iter()
        .map(|(&replicate, mask_r)| {
            Ok(GreenPixelMask {
                camera: profile.camera_id.clone(),
                replicate,
                t,
                mask: seg.green.and(mask_r)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagecore::label_blobs;

    #[test]
    fn exg_arithmetic() {
        let f = RgbImage::from_fn(3, 1, |x, _| match x {
            0 => [100.0, 100.0, 100.0],
            1 => [50.0, 120.0, 40.0],
            _ => [200.0, 10.0, 10.0],
        })
        .unwrap();
        assert_eq!(exg(&f).values(), &[0.0, 150.0, -190.0]);
    }

    #[test]
    fn sharpen_identity_cases() {
        let f = RgbImage::from_fn(9, 9, |x, y| [x as f32 * 9.0, y as f32, 3.0]).unwrap();
        assert_eq!(unsharp_sharpen(&f, 1.0, 0.0), f);
        let u = RgbImage::filled(9, 9, [80.0, 120.0, 40.0]).unwrap();
        let s = unsharp_sharpen(&u, 2.0, 1.5);
        for p in s.pixels() {
            for c in 0..3 {
                assert!((p[c] - u.get(0, 0)[c]).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn step_edge_overshoots() {
        let f = RgbImage::from_fn(20, 3, |x, _| {
            let v = if x < 10 { 100.0 } else { 200.0 };
            [v, v, v]
        })
        .unwrap();
        let s = unsharp_sharpen(&f, 1.0, 0.8);
        assert!(s.get(10, 1)[1] > 200.0);
        assert!(s.get(9, 1)[1] < 100.0);
        // far from the edge nothing changes
        assert!((s.get(0, 1)[1] - 100.0).abs() < 1e-3);
    }

    #[test]
    fn sobel_step_and_green_only() {
        let f = RgbImage::from_fn(10, 5, |x, _| [0.0, if x < 5 { 0.0 } else { 255.0 }, 0.0]).unwrap();
        let g = green_gradient(&f);
        let max = g.values().iter().cloned().fold(0.0f32, f32::max);
        assert_eq!(max, 1020.0);
        assert_eq!(g.get(4, 2), 1020.0);
        assert_eq!(g.get(5, 2), 1020.0);
        assert_eq!(g.get(2, 2), 0.0);

        let red = RgbImage::from_fn(10, 5, |x, _| [if x < 5 { 0.0 } else { 255.0 }, 50.0, 0.0]).unwrap();
        assert!(green_gradient(&red).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn flat_gradient_keeps_everything() {
        let g = ScalarImage::new(6, 6).unwrap();
        assert_eq!(gradient_blob_mask(&g).unwrap().count(), 36);
    }

    #[test]
    fn checkerboard_is_all_transition() {
        // left half flat, right half a checkerboard of 2-px cells
        let f = RgbImage::from_fn(64, 32, |x, y| {
            let v = if x < 32 {
                120.0
            } else if (x / 2 + y / 2) % 2 == 0 {
                40.0
            } else {
                200.0
            };
            [v, v, v]
        })
        .unwrap();
        let g = green_gradient(&f);
        let m = gradient_blob_mask(&g).unwrap();
        let kept_board = (0..32)
            .flat_map(|y| (33..64).map(move |x| (x, y)))
            .filter(|&(x, y)| m.get(x, y))
            .count();
        // a few replicated-border corners may survive
        assert!(kept_board <= 10, "{kept_board}");
        let blobs = label_blobs(&m, 25);
        assert_eq!(blobs.len(), 1);
        assert!(blobs.blobs()[0].pixels.iter().all(|&(x, _)| x < 32));

        // 1-px cells: the +-1 taps of both kernels see equal values, so the
        // interior gradient vanishes
        let board1 = RgbImage::from_fn(32, 32, |x, y| {
            let v = if (x + y) % 2 == 0 { 40.0 } else { 200.0 };
            [v, v, v]
        })
        .unwrap();
        let g = green_gradient(&board1);
        assert!((1..31).all(|y| (1..31).all(|x| g.get(x, y) == 0.0)));
    }

    fn blob_scene(exg_value: f32) -> (BlobSet, ExgMap) {
        let m = BinaryMask::from_fn(20, 10, |x, y| (2..12).contains(&x) && (2..8).contains(&y));
        let blobs = label_blobs(&m, 25);
        let e = ScalarImage::from_vec(20, 10, vec![exg_value; 200]).unwrap();
        (blobs, e)
    }

    #[test]
    fn blob_mean_threshold() {
        let all = BinaryMask::from_fn(20, 10, |_, _| true);
        let (b, e) = blob_scene(30.0);
        assert_eq!(green_pixels(&b, &e, &all, 25.0).unwrap().count(), 60);
        let (b, e) = blob_scene(20.0);
        assert_eq!(green_pixels(&b, &e, &all, 25.0).unwrap().count(), 0);
        // replicate mask covering the left half of the blob
        let half = BinaryMask::from_fn(20, 10, |x, _| x < 7);
        let (b, e) = blob_scene(30.0);
        assert_eq!(green_pixels(&b, &e, &half, 25.0).unwrap().count(), 30);
    }

    #[test]
    fn rim_recovery_stops_at_soil() {
        // blob core at x 4..8; rim column 3 and 8 green, column 2 soil-colored
        let core = BinaryMask::from_fn(12, 12, |x, y| (4..8).contains(&x) && (2..10).contains(&y));
        let blobs = label_blobs(&core, 25);
        let e = ScalarImage::from_vec(
            12,
            12,
            (0..144)
                .map(|i| {
                    let x = i % 12;
                    if (3..9).contains(&x) {
                        150.0
                    } else {
                        -20.0
                    }
                })
                .collect(),
        )
        .unwrap();
        let green = green_blob_union(&blobs, &e, 25.0);
        let rec = recover_rims(&green, &blobs, &e, 25.0);
        assert!(green.is_subset_of(&rec).unwrap());
        // the green band spans every row, so growth fills columns 3..9
        assert!(rec.get(3, 5) && rec.get(8, 5) && !rec.get(2, 5) && !rec.get(9, 5));
        assert!(rec.get(3, 0) && rec.get(8, 11));
    }

    #[test]
    fn mixed_blob_split_keeps_plant_drops_speckle() {
        // one soil blob covering the frame, with a 6x6 plant patch and three
        // isolated green pixels inside it
        let everything = BinaryMask::from_fn(30, 30, |_, _| true);
        let blobs = label_blobs(&everything, 25);
        let mut e = ScalarImage::from_vec(30, 30, vec![-20.0; 900]).unwrap();
        for y in 10..16 {
            for x in 10..16 {
                e.set(x, y, 120.0);
            }
        }
        for (x, y) in [(2, 2), (25, 4), (4, 26)] {
            e.set(x, y, 120.0);
        }
        assert_eq!(green_blob_union(&blobs, &e, 25.0).count(), 0);
        let split = split_mixed_blobs(&blobs, &e, 25.0, 25, Connectivity::Eight);
        assert_eq!(split.count(), 36);
        assert!(split.get(10, 10) && split.get(15, 15) && !split.get(2, 2));
        // a blob that already passes contributes nothing here
        let plant = ScalarImage::from_vec(30, 30, vec![80.0; 900]).unwrap();
        assert_eq!(
            split_mixed_blobs(&blobs, &plant, 25.0, 25, Connectivity::Eight).count(),
            0
        );
    }
}
