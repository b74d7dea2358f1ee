use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cotyledon growth. The semi-major axis of each cotyledon after `tau` hours
/// of emergence is
///
/// `rate * m(t) * (open_mm * (1 - exp(-tau / open_tau_h)) + expand_mm * (1 - exp(-tau / expand_tau_h)))`
///
/// where `m(t) = 1 + diurnal_amplitude * sin(2 pi (clock - 8) / 24)` and
/// `rate` is drawn per seedling from `1 +- rate_spread`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthParams {
    pub open_mm: f64,
    pub open_tau_h: f64,
    pub expand_mm: f64,
    pub expand_tau_h: f64,
    /// Minor over major semi-axis of a cotyledon.
    pub aspect: f64,
    pub diurnal_amplitude: f64,
    pub rate_spread: f64,
}

impl Default for GrowthParams {
    fn default() -> Self {
        Self {
            open_mm: 2.5,
            open_tau_h: 0.25,
            expand_mm: 5.0,
            expand_tau_h: 70.0,
            aspect: 0.55,
            diurnal_amplitude: 0.04,
            rate_spread: 0.12,
        }
    }
}

/// Brown-Conrady coefficients applied with the focal length set to the frame
/// width and the principal point at the frame center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LensConfig {
    pub k1: f64,
    #[serde(default)]
    pub k2: f64,
    #[serde(default)]
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
}

/// Physical layout and stochastic knobs of a synthetic experiment.
///
/// Each camera sees up to four square trays in a 2x2 arrangement with the
/// centering marker at the frame center and the gray patch in the gap above
/// it, level with the middle of the upper trays. Seeds sit on a square grid
/// centered in each tray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    pub cameras: usize,
    pub replicates_per_camera: usize,
    pub seeds_per_replicate: usize,
    pub seed_spacing_mm: f64,
    /// Uniform jitter of each sowing position, per axis.
    pub position_jitter_mm: f64,
    pub tray_size_mm: f64,
    pub tray_gap_mm: f64,
    pub margin_mm: f64,
    /// Replicate quads in the calibration profile are drawn this far inside
    /// the tray walls.
    pub quad_inset_mm: f64,
    pub mm_per_px: f64,
    pub marker_size_mm: f64,
    pub gray_patch_mm: f64,
    /// One value shared by all replicates, or one per replicate in camera
    /// order.
    pub germination_fractions: Vec<f64>,
    /// Emergence times follow a normal law truncated to
    /// `[emergence_min_h, emergence_max_h]`.
    pub emergence_mean_h: f64,
    pub emergence_sd_h: f64,
    pub emergence_min_h: f64,
    pub emergence_max_h: f64,
    pub growth: GrowthParams,
    /// Per-frame illumination factor range.
    pub illumination_range: [f64; 2],
    /// Per-channel deviation of the illumination factor, as a fraction.
    pub color_cast: f64,
    /// Per-frame camera drift is uniform in `[-drift_px, drift_px]` per axis.
    pub drift_px: u32,
    pub lens: Option<LensConfig>,
    pub noise_sigma: f64,
    /// Wall-clock hour at `t = 0`.
    pub sowing_clock_h: f64,
    /// Round rendered values to 8 bits like a real camera.
    pub quantize: bool,
    pub rng_seed: u64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            cameras: 3,
            replicates_per_camera: 4,
            seeds_per_replicate: 49,
            seed_spacing_mm: 20.0,
            position_jitter_mm: 2.0,
            tray_size_mm: 160.0,
            tray_gap_mm: 40.0,
            margin_mm: 25.0,
            quad_inset_mm: 3.0,
            mm_per_px: 0.441,
            marker_size_mm: 30.0,
            gray_patch_mm: 20.0,
            germination_fractions: vec![0.9],
            emergence_mean_h: 60.0,
            emergence_sd_h: 18.0,
            emergence_min_h: 24.0,
            emergence_max_h: 140.0,
            growth: GrowthParams::default(),
            illumination_range: [0.7, 1.3],
            color_cast: 0.03,
            drift_px: 0,
            lens: None,
            noise_sigma: 1.5,
            sowing_clock_h: 8.0,
            quantize: true,
            rng_seed: 1,
        }
    }
}

impl SceneConfig {
    /// Reads a TOML scene description; missing keys take the defaults.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn replicate_count(&self) -> usize {
        self.cameras * self.replicates_per_camera
    }

    /// Germination fraction of the replicate at `index` in camera order.
    pub fn germination_fraction(&self, index: usize) -> f64 {
        if self.germination_fractions.len() == 1 {
            self.germination_fractions[0]
        } else {
            self.germination_fractions[index]
        }
    }

    /// `n` fractions evenly spaced over `[lo, hi]`.
    pub fn spread_fractions(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }

    /// Seed grid columns and rows.
    pub fn grid(&self) -> (usize, usize) {
        let cols = (self.seeds_per_replicate as f64).sqrt().ceil() as usize;
        let cols = cols.max(1);
        (cols, self.seeds_per_replicate.div_ceil(cols))
    }

    pub fn frame_side_mm(&self) -> f64 {
        2.0 * self.margin_mm + 2.0 * self.tray_size_mm + self.tray_gap_mm
    }

    pub fn frame_side_px(&self) -> usize {
        (self.frame_side_mm() / self.mm_per_px).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.cameras == 0 {
            return bad("at least one camera is required".into());
        }
        if !(1..=4).contains(&self.replicates_per_camera) {
            return bad(format!(
                "replicates_per_camera must be 1..=4, got {}",
                self.replicates_per_camera
            ));
        }
        if self.seeds_per_replicate == 0 {
            return bad("seeds_per_replicate must be positive".into());
        }
        let lengths = [
            ("seed_spacing_mm", self.seed_spacing_mm),
            ("tray_size_mm", self.tray_size_mm),
            ("tray_gap_mm", self.tray_gap_mm),
            ("margin_mm", self.margin_mm),
            ("mm_per_px", self.mm_per_px),
            ("marker_size_mm", self.marker_size_mm),
            ("gray_patch_mm", self.gray_patch_mm),
        ];
        for (name, v) in lengths {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.quad_inset_mm >= 0.0 && self.quad_inset_mm < self.tray_size_mm / 4.0) {
            return bad(format!(
                "quad_inset_mm must be in [0, tray/4), got {}",
                self.quad_inset_mm
            ));
        }
        if !(self.position_jitter_mm >= 0.0) {
            return bad("position_jitter_mm must be non-negative".into());
        }
        let n = self.germination_fractions.len();
        if n != 1 && n != self.replicate_count() {
            return bad(format!(
                "germination_fractions needs 1 or {} values, got {n}",
                self.replicate_count()
            ));
        }
        if let Some(f) = self.germination_fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
            return bad(format!("germination fraction {f} is outside [0, 1]"));
        }
        if !(self.emergence_sd_h > 0.0) || !self.emergence_mean_h.is_finite() {
            return bad("emergence distribution needs a finite mean and positive spread".into());
        }
        if !(self.emergence_min_h >= 0.0 && self.emergence_min_h < self.emergence_max_h) {
            return bad("emergence window must satisfy 0 <= min < max".into());
        }
        let g = &self.growth;
        for (name, v) in [
            ("growth.open_mm", g.open_mm),
            ("growth.open_tau_h", g.open_tau_h),
            ("growth.expand_mm", g.expand_mm),
            ("growth.expand_tau_h", g.expand_tau_h),
            ("growth.aspect", g.aspect),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if !(0.0..1.0).contains(&g.diurnal_amplitude) || !(0.0..1.0).contains(&g.rate_spread) {
            return bad("diurnal_amplitude and rate_spread must be in [0, 1)".into());
        }
        let [lo, hi] = self.illumination_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return bad(format!("illumination range [{lo}, {hi}] is invalid"));
        }
        if !(0.0..0.5).contains(&self.color_cast) || !(self.noise_sigma >= 0.0) {
            return bad("color_cast must be in [0, 0.5) and noise_sigma non-negative".into());
        }

        // Layout: seeds inside their tray, trays and fixtures inside the frame.
        let (cols, rows) = self.grid();
        let extent = (cols.max(rows) - 1) as f64 * self.seed_spacing_mm + 2.0 * self.position_jitter_mm;
        if extent >= self.tray_size_mm {
            return bad(format!(
                "layout overflow: a {cols}x{rows} seed grid at {} mm spans {extent} mm, tray is {} mm",
                self.seed_spacing_mm, self.tray_size_mm
            ));
        }
        if self.marker_size_mm >= self.tray_gap_mm {
            return bad("marker must fit in the gap between trays".into());
        }
        if self.gray_patch_mm >= self.tray_gap_mm {
            return bad("gray patch must fit in the gap between trays".into());
        }
        Ok(())
    }
}

pub fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Config("acquisition schedule is empty".into()));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::Config(
            "acquisition times must be finite and non-negative".into(),
        ));
    }
    if times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("acquisition times must be strictly increasing".into()));
    }
    Ok(())
}

/// Five acquisitions a day at 08:00, 11:00, 14:00, 17:00 and 20:00 for
/// `days` days, with sowing at 08:00 on day zero.
pub fn default_schedule(days: usize) -> Vec<f64> {
    (1..=days)
        .flat_map(|d| [0.0, 3.0, 6.0, 9.0, 12.0].map(|h| 24.0 * d as f64 + h))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip() {
        let mut c = SceneConfig {
            germination_fractions: SceneConfig::spread_fractions(0.5, 1.0, 12),
            ..SceneConfig::default()
        };
        let text = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<SceneConfig>(&text).unwrap(), c);
        c.lens = Some(LensConfig {
            k1: -0.1,
            k2: 0.01,
            p1: 0.0,
            p2: 0.001,
        });
        let text = toml::to_string(&c).unwrap();
        assert_eq!(toml::from_str::<SceneConfig>(&text).unwrap(), c);
        let partial: SceneConfig = toml::from_str("rng_seed = 9\n[growth]\naspect = 0.5\n").unwrap();
        assert_eq!((partial.rng_seed, partial.growth.aspect, partial.cameras), (9, 0.5, 3));
    }

    #[test]
    fn defaults_are_valid() {
        SceneConfig::default().validate().unwrap();
        let s = default_schedule(10);
        assert_eq!(s.len(), 50);
        assert_eq!(&s[..6], &[24.0, 27.0, 30.0, 33.0, 36.0, 48.0]);
        validate_times(&s).unwrap();
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = SceneConfig::default();
        c.germination_fractions = vec![1.2];
        assert!(c.validate().is_err());

        let mut c = SceneConfig::default();
        c.seed_spacing_mm = 30.0;
        assert!(matches!(c.validate(), Err(Error::Config(m)) if m.contains("overflow")));

        let mut c = SceneConfig::default();
        c.growth.expand_tau_h = 0.0;
        assert!(c.validate().is_err());

        let mut c = SceneConfig::default();
        c.germination_fractions = vec![0.5, 0.6];
        assert!(c.validate().is_err());

        assert!(validate_times(&[3.0, 3.0]).is_err());
        assert!(validate_times(&[]).is_err());
    }

    #[test]
    fn grid_shape() {
        let mut c = SceneConfig::default();
        assert_eq!(c.grid(), (7, 7));
        c.seeds_per_replicate = 10;
        assert_eq!(c.grid(), (4, 3));
    }

    #[test]
    fn fraction_spread() {
        let f = SceneConfig::spread_fractions(0.5, 1.0, 11);
        assert_eq!(f.len(), 11);
        assert!((f[0] - 0.5).abs() < 1e-12 && (f[10] - 1.0).abs() < 1e-12);
    }
}
