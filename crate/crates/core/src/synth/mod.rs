//! Synthetic time-lapse experiments with known germination schedules.
//!
//! A [`Scene`] fixes the layout, every seed's fate and the per-frame camera
//! conditions up front, then renders any `(camera, epoch)` frame on demand.
//! Rendering is a pure function of the configuration and the frame index, so
//! frames can be produced in any order or in parallel.

mod config;
mod export;
mod seedling;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{default_schedule, validate_times, GrowthParams, LensConfig, SceneConfig};
pub use export::{acquisition_timestamp, export_experiment, ExportLayout, SOWING_DATE};
pub use seedling::{analytic_pair_area, union_area_px, Footprint, LOBE_OFFSET};

use crate::calibration::{
    distort_frame, translate, DistortionModel, MarkerSpec, ProfileDocument, ReplicateId, ReplicateQuad,
    PROFILE_SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::imagecore::{Polygon, RgbImage};

const BENCH: [f32; 3] = [200.0, 200.0, 196.0];
const SOIL: [f32; 3] = [128.0, 86.0, 62.0];
const MARKER_DARK: [f32; 3] = [25.0, 25.0, 25.0];
const MARKER_LIGHT: [f32; 3] = [235.0, 235.0, 235.0];
const GRAY: f32 = 155.0;

/// Bit cells inside the marker's dark border; asymmetric so the pattern has
/// a single best alignment.
const MARKER_BITS: [[u8; 5]; 5] = [
    [1, 0, 1, 1, 0],
    [0, 1, 0, 1, 1],
    [1, 1, 0, 0, 0],
    [0, 0, 1, 1, 1],
    [1, 0, 1, 0, 1],
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedTruth {
    pub camera: String,
    pub replicate: ReplicateId,
    /// Position within the replicate's seed grid, row-major.
    pub index: usize,
    /// Sowing position relative to the tray's top-left corner.
    pub position_mm: [f64; 2],
    /// Sowing position in undistorted, drift-free frame coordinates.
    pub position_px: [f64; 2],
    pub germinated: bool,
    /// Hours after sowing; present iff `germinated`.
    pub emergence_time: Option<f64>,
    /// Whether this seedling touches another one at the last acquisition.
    pub overlaps_neighbor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaTruth {
    pub camera: String,
    pub replicate: ReplicateId,
    pub t: f64,
    /// Area of the union of all seedling footprints in the replicate.
    pub leaf_area_mm2: f64,
    /// Seedlings emerged at or before `t`.
    pub emerged: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameTruth {
    pub camera: String,
    pub epoch: usize,
    pub t: f64,
    /// Per-channel illumination factor applied to the whole frame.
    pub illumination: [f64; 3],
    /// Content shift applied to the frame, pixels.
    pub drift: [i32; 2],
}

/// Everything the renderer decided, for scoring a pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub mm_per_px: f64,
    pub times: Vec<f64>,
    pub seeds: Vec<SeedTruth>,
    pub areas: Vec<AreaTruth>,
    pub frames: Vec<FrameTruth>,
}

impl GroundTruth {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n").map_err(|e| Error::io(path, e))
    }

    /// Seedlings emerged by `t` per replicate, including replicates with
    /// none.
    pub fn counts_at(&self, t: f64) -> BTreeMap<(String, ReplicateId), u32> {
        let mut out = BTreeMap::new();
        for s in &self.seeds {
            let n = out.entry((s.camera.clone(), s.replicate)).or_insert(0);
            if s.emergence_time.is_some_and(|e| e <= t) {
                *n += 1;
            }
        }
        out
    }

    /// Counts a careful human would report after the last acquisition.
    pub fn final_counts(&self) -> BTreeMap<(String, ReplicateId), u32> {
        self.counts_at(self.times.last().copied().unwrap_or(f64::NEG_INFINITY))
    }

    /// Index of the first acquisition at which a seedling that emerged at
    /// `emergence` is present.
    pub fn first_epoch_at_or_after(&self, emergence: f64) -> Option<usize> {
        self.times.iter().position(|&t| t >= emergence)
    }
}

/// One rendered frame.
#[derive(Debug, Clone)]
pub struct SynthFrame {
    pub camera: String,
    pub epoch: usize,
    pub t: f64,
    pub image: RgbImage,
}

#[derive(Debug, Clone)]
struct Seed {
    pos_px: (f64, f64),
    angle: f64,
    rate: f64,
    color: [f32; 3],
    emergence: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
struct FrameParams {
    illumination: [f64; 3],
    drift: (i32, i32),
}

/// A fully determined synthetic experiment.
pub struct Scene {
    config: SceneConfig,
    times: Vec<f64>,
    side: usize,
    camera_ids: Vec<String>,
    /// Indices into `seeds` per camera and local replicate.
    replicate_seeds: Vec<Vec<Vec<usize>>>,
    seeds: Vec<Seed>,
    backgrounds: Vec<RgbImage>,
    lens: Option<DistortionModel>,
    truth: GroundTruth,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const SETUP_STREAM: u64 = 0;
const TEXTURE_STREAM: u64 = 1 << 16;
const FRAME_STREAM: u64 = 1 << 32;

impl Scene {
    pub fn new(config: SceneConfig, times: &[f64]) -> Result<Self> {
        config.validate()?;
        validate_times(times)?;
        let side = config.frame_side_px();
        let camera_ids: Vec<String> = (1..=config.cameras).map(|c| format!("cam{c}")).collect();
        let lens = config.lens.map(|l| DistortionModel {
            k1: l.k1,
            k2: l.k2,
            p1: l.p1,
            p2: l.p2,
            ..DistortionModel::identity(side, side)
        });

        let mut scene = Scene {
            side,
            camera_ids,
            replicate_seeds: Vec::new(),
            seeds: Vec::new(),
            backgrounds: Vec::new(),
            lens,
            truth: GroundTruth {
                mm_per_px: config.mm_per_px,
                times: times.to_vec(),
                seeds: Vec::new(),
                areas: Vec::new(),
                frames: Vec::new(),
            },
            times: times.to_vec(),
            config,
        };
        scene.sow();
        scene.backgrounds = (0..scene.config.cameras)
            .into_par_iter()
            .map(|c| scene.background(c))
            .collect();
        scene.truth.areas = scene.area_truth();
        scene.mark_overlaps();
        scene.truth.frames = (0..scene.config.cameras)
            .flat_map(|c| (0..scene.times.len()).map(move |e| (c, e)))
            .map(|(c, e)| {
                let p = scene.frame_params(c, e).0;
                FrameTruth {
                    camera: scene.camera_ids[c].clone(),
                    epoch: e,
                    t: scene.times[e],
                    illumination: p.illumination,
                    drift: [p.drift.0, p.drift.1],
                }
            })
            .collect();
        Ok(scene)
    }

    pub fn config(&self) -> &SceneConfig {
        &self.config
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn camera_ids(&self) -> &[String] {
        &self.camera_ids
    }

    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }

    pub fn frame_size(&self) -> (usize, usize) {
        (self.side, self.side)
    }

    pub fn replicate_id(&self, camera: usize, local: usize) -> ReplicateId {
        (camera * self.config.replicates_per_camera + local + 1) as ReplicateId
    }

    fn px(&self, mm: f64) -> f64 {
        mm / self.config.mm_per_px
    }

    /// Top-left corner of a tray, mm.
    fn tray_origin_mm(&self, local: usize) -> (f64, f64) {
        let c = &self.config;
        let step = c.tray_size_mm + c.tray_gap_mm;
        (
            c.margin_mm + (local % 2) as f64 * step,
            c.margin_mm + (local / 2) as f64 * step,
        )
    }

    fn tray_rect_px(&self, local: usize) -> (f64, f64, f64, f64) {
        let (x, y) = self.tray_origin_mm(local);
        let s = self.config.tray_size_mm;
        (self.px(x), self.px(y), self.px(x + s), self.px(y + s))
    }

    fn center_px(&self) -> f64 {
        self.side as f64 / 2.0
    }

    fn marker_rect_px(&self) -> (f64, f64, f64, f64) {
        let (c, h) = (self.center_px(), self.px(self.config.marker_size_mm) / 2.0);
        (c - h, c - h, c + h, c + h)
    }

    fn gray_center_px(&self) -> (f64, f64) {
        let c = &self.config;
        (
            self.center_px(),
            self.center_px() - self.px(c.tray_gap_mm / 2.0 + c.tray_size_mm / 2.0),
        )
    }

    fn gray_rect_px(&self) -> (f64, f64, f64, f64) {
        let (x, y) = self.gray_center_px();
        let h = self.px(self.config.gray_patch_mm) / 2.0;
        (x - h, y - h, x + h, y + h)
    }

    /// Authored calibration document for one camera: replicate and marker
    /// quads in ideal frame coordinates, without the derived section.
    pub fn profile_document(&self, camera: usize) -> Result<ProfileDocument> {
        let replicates = (0..self.config.replicates_per_camera)
            .map(|r| {
                let (x0, y0, x1, y1) = self.tray_rect_px(r);
                let d = self.px(self.config.quad_inset_mm);
                let (x0, y0, x1, y1) = (x0 + d, y0 + d, x1 - d, y1 - d);
                Ok(ReplicateQuad {
                    id: self.replicate_id(camera, r),
                    quad: Polygon::rect(x0, y0, x1, y1)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let (x0, y0, x1, y1) = self.marker_rect_px();
        let (gx, gy) = self.gray_center_px();
        Ok(ProfileDocument {
            schema_version: PROFILE_SCHEMA_VERSION,
            camera_id: self.camera_ids[camera].clone(),
            distortion: self
                .lens
                .unwrap_or_else(|| DistortionModel::identity(self.side, self.side)),
            replicates,
            marker: MarkerSpec {
                quad: Polygon::rect(x0, y0, x1, y1)?,
                physical_area_mm2: self.config.marker_size_mm.powi(2),
            },
            gray_center: [gx, gy],
            derived: None,
        })
    }

    fn sow(&mut self) {
        let c = self.config.clone();
        let mut rng = stream_rng(c.rng_seed, SETUP_STREAM);
        let (cols, rows) = c.grid();
        let offset_x = (c.tray_size_mm - (cols - 1) as f64 * c.seed_spacing_mm) / 2.0;
        let offset_y = (c.tray_size_mm - (rows - 1) as f64 * c.seed_spacing_mm) / 2.0;
        let emergence_law = Normal::new(c.emergence_mean_h, c.emergence_sd_h).expect("validated spread");

        for cam in 0..c.cameras {
            let mut per_rep = Vec::new();
            for local in 0..c.replicates_per_camera {
                let global = cam * c.replicates_per_camera + local;
                let fraction = c.germination_fraction(global);
                let (tx, ty) = self.tray_origin_mm(local);
                let mut ids = Vec::new();
                for index in 0..c.seeds_per_replicate {
                    let j = c.position_jitter_mm;
                    let mx = offset_x + (index % cols) as f64 * c.seed_spacing_mm + rng.gen_range(-j..=j);
                    let my = offset_y + (index / cols) as f64 * c.seed_spacing_mm + rng.gen_range(-j..=j);
                    let germinated = rng.gen_bool(fraction);
                    let mut emergence = c.emergence_mean_h;
                    for _ in 0..1000 {
                        emergence = emergence_law.sample(&mut rng);
                        if (c.emergence_min_h..=c.emergence_max_h).contains(&emergence) {
                            break;
                        }
                    }
                    let emergence = emergence.clamp(c.emergence_min_h, c.emergence_max_h);
                    let angle = rng.gen_range(0.0..PI);
                    let rate = 1.0 + rng.gen_range(-1.0..=1.0) * c.growth.rate_spread;
                    let color = [
                        rng.gen_range(70.0..90.0),
                        rng.gen_range(138.0..158.0),
                        rng.gen_range(40.0..60.0),
                    ];
                    let pos_px = (self.px(tx + mx), self.px(ty + my));
                    ids.push(self.seeds.len());
                    self.seeds.push(Seed {
                        pos_px,
                        angle,
                        rate,
                        color,
                        emergence: germinated.then_some(emergence),
                    });
                    self.truth.seeds.push(SeedTruth {
                        camera: self.camera_ids[cam].clone(),
                        replicate: self.replicate_id(cam, local),
                        index,
                        position_mm: [mx, my],
                        position_px: [pos_px.0, pos_px.1],
                        germinated,
                        emergence_time: germinated.then_some(emergence),
                        overlaps_neighbor: false,
                    });
                }
                per_rep.push(ids);
            }
            self.replicate_seeds.push(per_rep);
        }
    }

    /// Cotyledon semi-major axis in mm at time `t`.
    fn lobe_mm(&self, seed: &Seed, t: f64) -> f64 {
        let Some(e) = seed.emergence else { return 0.0 };
        if t <= e {
            return 0.0;
        }
        let g = &self.config.growth;
        let tau = t - e;
        let clock = self.config.sowing_clock_h + t;
        let diurnal = 1.0 + g.diurnal_amplitude * (2.0 * PI * (clock - 8.0) / 24.0).sin();
        seed.rate
            * diurnal
            * (g.open_mm * (1.0 - (-tau / g.open_tau_h).exp()) + g.expand_mm * (1.0 - (-tau / g.expand_tau_h).exp()))
    }

    fn footprint(&self, seed: &Seed, t: f64) -> Footprint {
        let a = self.px(self.lobe_mm(seed, t));
        Footprint::new(
            seed.pos_px.0,
            seed.pos_px.1,
            a,
            a * self.config.growth.aspect,
            seed.angle,
        )
    }

    /// Footprints of every seedling in a replicate at `t`, in seed order.
    pub fn footprints(&self, camera: usize, local: usize, t: f64) -> Vec<Footprint> {
        self.replicate_seeds[camera][local]
            .iter()
            .map(|&i| self.footprint(&self.seeds[i], t))
            .collect()
    }

    fn area_truth(&self) -> Vec<AreaTruth> {
        let pairs: Vec<(usize, usize)> = (0..self.config.cameras)
            .flat_map(|c| (0..self.config.replicates_per_camera).map(move |r| (c, r)))
            .collect();
        let mm2 = self.config.mm_per_px.powi(2);
        pairs
            .par_iter()
            .flat_map_iter(|&(c, r)| {
                self.times.iter().map(move |&t| {
                    let fps = self.footprints(c, r, t);
                    let emerged = self.replicate_seeds[c][r]
                        .iter()
                        .filter(|&&i| self.seeds[i].emergence.is_some_and(|e| e <= t))
                        .count() as u32;
                    AreaTruth {
                        camera: self.camera_ids[c].clone(),
                        replicate: self.replicate_id(c, r),
                        t,
                        leaf_area_mm2: union_area_px(&fps, self.side, self.side) * mm2,
                        emerged,
                    }
                })
            })
            .collect()
    }

    /// Flags seedlings sharing at least one rendered pixel with another
    /// seedling at the last acquisition.
    fn mark_overlaps(&mut self) {
        let t = *self.times.last().expect("validated schedule");
        for c in 0..self.config.cameras {
            for r in 0..self.config.replicates_per_camera {
                let ids = self.replicate_seeds[c][r].clone();
                let mut owner: BTreeMap<(i64, i64), usize> = BTreeMap::new();
                let mut touching = vec![false; ids.len()];
                for (k, &i) in ids.iter().enumerate() {
                    let fp = self.footprint(&self.seeds[i], t);
                    if fp.a <= 0.0 {
                        continue;
                    }
                    let (x0, y0, x1, y1) = fp.pixel_bounds();
                    for y in y0..=y1 {
                        for x in x0..=x1 {
                            if !fp.contains(x as f64 + 0.5, y as f64 + 0.5) {
                                continue;
                            }
                            match owner.get(&(x, y)) {
                                Some(&o) if o != k => {
                                    touching[o] = true;
                                    touching[k] = true;
                                }
                                Some(_) => {}
                                None => {
                                    owner.insert((x, y), k);
                                }
                            }
                        }
                    }
                }
                for (k, &i) in ids.iter().enumerate() {
                    self.truth.seeds[i].overlaps_neighbor = touching[k];
                }
            }
        }
    }

    /// Static part of a camera's view: bench, soil texture, marker and gray
    /// patch, before illumination and noise.
    fn background(&self, camera: usize) -> RgbImage {
        let mut rng = stream_rng(self.config.rng_seed, TEXTURE_STREAM + camera as u64);
        let coarse = ValueNoise::new(&mut rng, self.side, 24.0);
        let fine = ValueNoise::new(&mut rng, self.side, 6.0);
        let grain = Normal::new(0.0f32, 3.0).expect("positive sigma");
        let trays: Vec<_> = (0..self.config.replicates_per_camera)
            .map(|r| self.tray_rect_px(r))
            .collect();
        let marker = self.marker_rect_px();
        let gray = self.gray_rect_px();
        let inside = |(x0, y0, x1, y1): (f64, f64, f64, f64), x: f64, y: f64| x >= x0 && x < x1 && y >= y0 && y < y1;
        let marker_side = marker.2 - marker.0;
        let border = marker_side * 0.125;
        let cell = (marker_side - 2.0 * border) / 5.0;

        RgbImage::from_fn(self.side, self.side, |x, y| {
            let (u, v) = (x as f64 + 0.5, y as f64 + 0.5);
            if inside(gray, u, v) {
                return [GRAY; 3];
            }
            if inside(marker, u, v) {
                let (i, j) = ((u - marker.0 - border) / cell, (v - marker.1 - border) / cell);
                let bit =
                    (0.0..5.0).contains(&i) && (0.0..5.0).contains(&j) && MARKER_BITS[j as usize][i as usize] == 1;
                return if bit { MARKER_LIGHT } else { MARKER_DARK };
            }
            let g = [grain.sample(&mut rng), grain.sample(&mut rng), grain.sample(&mut rng)];
            if trays.iter().any(|&t| inside(t, u, v)) {
                let shade = 1.0 + 0.07 * coarse.at(u, v) + 0.035 * fine.at(u, v);
                [0, 1, 2].map(|k| SOIL[k] * shade as f32 + g[k])
            } else {
                [0, 1, 2].map(|k| BENCH[k] + g[k])
            }
        })
        .expect("positive frame size")
    }

    /// Frame conditions and the generator positioned for the noise draws.
    fn frame_params(&self, camera: usize, epoch: usize) -> (FrameParams, ChaCha8Rng) {
        let stream = FRAME_STREAM + ((camera as u64) << 20) + epoch as u64 + 1;
        let mut rng = stream_rng(self.config.rng_seed, stream);
        let [lo, hi] = self.config.illumination_range;
        let lambda = if lo < hi { rng.gen_range(lo..=hi) } else { lo };
        let cast = self.config.color_cast;
        let illumination =
            [0, 1, 2].map(|_| lambda * (1.0 + if cast > 0.0 { rng.gen_range(-cast..=cast) } else { 0.0 }));
        let d = self.config.drift_px as i32;
        let drift = (rng.gen_range(-d..=d), rng.gen_range(-d..=d));
        (FrameParams { illumination, drift }, rng)
    }

    /// Scene as seen at time `t`, undistorted, drift-free, unit illumination
    /// and without sensor noise.
    pub fn render_ideal(&self, camera: usize, t: f64) -> RgbImage {
        let mut img = self.backgrounds[camera].clone();
        for local in 0..self.config.replicates_per_camera {
            for &i in &self.replicate_seeds[camera][local] {
                let seed = &self.seeds[i];
                let fp = self.footprint(seed, t);
                if fp.a <= 0.0 {
                    continue;
                }
                let (x0, y0, x1, y1) = fp.pixel_bounds();
                for y in y0.max(0)..=y1.min(self.side as i64 - 1) {
                    for x in x0.max(0)..=x1.min(self.side as i64 - 1) {
                        if fp.contains(x as f64 + 0.5, y as f64 + 0.5) {
                            img.set(x as usize, y as usize, seed.color);
                        }
                    }
                }
            }
        }
        img
    }

    fn finish(&self, mut img: RgbImage, params: FrameParams, mut rng: ChaCha8Rng) -> RgbImage {
        let gray = self.gray_rect_px();
        let noise = Normal::new(0.0f32, self.config.noise_sigma as f32)
            .ok()
            .filter(|_| self.config.noise_sigma > 0.0);
        let lambda = params.illumination.map(|v| v as f32);
        let w = img.width();
        for (k, p) in img.pixels_mut().iter_mut().enumerate() {
            let (u, v) = ((k % w) as f64 + 0.5, (k / w) as f64 + 0.5);
            let in_gray = u >= gray.0 && u < gray.2 && v >= gray.1 && v < gray.3;
            for c in 0..3 {
                p[c] *= lambda[c];
                if let (false, Some(n)) = (in_gray, &noise) {
                    p[c] += n.sample(&mut rng);
                }
            }
        }
        let mut img = translate(&img, params.drift.0, params.drift.1);
        if let Some(model) = &self.lens {
            img = distort_frame(&img, model);
        }
        if self.config.quantize {
            for p in img.pixels_mut() {
                for c in p.iter_mut() {
                    *c = c.round().clamp(0.0, 255.0);
                }
            }
        }
        img
    }

    /// Raw camera frame for acquisition `epoch`.
    pub fn render(&self, camera: usize, epoch: usize) -> RgbImage {
        let (params, rng) = self.frame_params(camera, epoch);
        self.finish(self.render_ideal(camera, self.times[epoch]), params, rng)
    }

    /// Frame of the empty bench under unit illumination, for building the
    /// calibration profile.
    pub fn calibration_frame(&self, camera: usize) -> RgbImage {
        let rng = stream_rng(self.config.rng_seed, FRAME_STREAM + ((camera as u64) << 20));
        let params = FrameParams {
            illumination: [1.0; 3],
            drift: (0, 0),
        };
        self.finish(self.backgrounds[camera].clone(), params, rng)
    }
}

/// Bilinearly interpolated lattice noise in `[-1, 1]`.
struct ValueNoise {
    cell: f64,
    n: usize,
    values: Vec<f64>,
}

impl ValueNoise {
    fn new(rng: &mut ChaCha8Rng, side: usize, cell: f64) -> Self {
        let n = (side as f64 / cell).ceil() as usize + 2;
        Self {
            cell,
            n,
            values: (0..n * n).map(|_| rng.gen_range(-1.0..=1.0)).collect(),
        }
    }

    fn at(&self, x: f64, y: f64) -> f64 {
        let (gx, gy) = (x / self.cell, y / self.cell);
        let (i, j) = (gx.floor() as usize, gy.floor() as usize);
        let (fx, fy) = (gx - i as f64, gy - j as f64);
        let v = |a: usize, b: usize| self.values[(b.min(self.n - 1)) * self.n + a.min(self.n - 1)];
        let top = v(i, j) * (1.0 - fx) + v(i + 1, j) * fx;
        let bottom = v(i, j + 1) * (1.0 - fx) + v(i + 1, j + 1) * fx;
        top * (1.0 - fy) + bottom * fy
    }
}

/// Lazily rendered frames of a sequence, camera-major then by epoch.
pub struct SynthFrames {
    scene: Scene,
    next: usize,
}

impl SynthFrames {
    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn into_scene(self) -> Scene {
        self.scene
    }
}

impl Iterator for SynthFrames {
    type Item = SynthFrame;

    fn next(&mut self) -> Option<SynthFrame> {
        let per_camera = self.scene.times.len();
        if self.next >= per_camera * self.scene.config.cameras {
            return None;
        }
        let (camera, epoch) = (self.next / per_camera, self.next % per_camera);
        self.next += 1;
        Some(SynthFrame {
            camera: self.scene.camera_ids[camera].clone(),
            epoch,
            t: self.scene.times[epoch],
            image: self.scene.render(camera, epoch),
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.scene.times.len() * self.scene.config.cameras - self.next;
        (n, Some(n))
    }
}

impl ExactSizeIterator for SynthFrames {}

/// Frames and truth for `config` over the acquisition schedule `times`.
/// Frames render when the iterator is advanced.
pub fn generate_sequence(config: &SceneConfig, times: &[f64]) -> Result<(SynthFrames, GroundTruth)> {
    let scene = Scene::new(config.clone(), times)?;
    let truth = scene.truth().clone();
    Ok((SynthFrames { scene, next: 0 }, truth))
}
