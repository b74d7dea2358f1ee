use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calibration::DEFAULT_SEARCH_RADIUS;
use crate::clustering::DEFAULT_LINK_DIST_MM;
use crate::error::{Error, Result};
use crate::imagecore::Connectivity;
use crate::radiometry::GRAY_REFERENCE;
use crate::segmentation::SegmentationConfig;

/// Every tunable of an analysis run. Loaded from TOML; missing keys take
/// the defaults below, unknown keys are rejected.
///
/// ```toml
/// t_exg = 25.0          # excess-green threshold for a blob to count as plant
/// min_blob_px = 25      # smallest gradient blob kept, pixels
/// link_dist_mm = 5.0    # single-linkage distance between blobs
/// gray = 155.0          # target value of the gray reference patch
/// sharpen_sigma = 1.0   # unsharp-mask Gaussian sigma, pixels
/// sharpen_amount = 0.8
/// search_radius = 20    # marker search window half-size, pixels
/// rim_recovery = true   # re-admit green pixels on plant borders
/// split_mixed_blobs = true  # rescue plants merged into a soil blob
/// connectivity = "eight"    # or "four"
/// pixel_level_exg = false
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub t_exg: f64,
    pub min_blob_px: usize,
    pub link_dist_mm: f64,
    pub gray: f64,
    pub sharpen_sigma: f64,
    pub sharpen_amount: f64,
    pub search_radius: u32,
    pub rim_recovery: bool,
    pub split_mixed_blobs: bool,
    pub connectivity: Connectivity,
    pub pixel_level_exg: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let seg = SegmentationConfig::default();
        Self {
            t_exg: seg.t_exg,
            min_blob_px: seg.min_blob_px,
            link_dist_mm: DEFAULT_LINK_DIST_MM,
            gray: GRAY_REFERENCE,
            sharpen_sigma: seg.sharpen_radius,
            sharpen_amount: seg.sharpen_amount,
            search_radius: DEFAULT_SEARCH_RADIUS,
            rim_recovery: seg.rim_recovery,
            split_mixed_blobs: seg.split_mixed_blobs,
            connectivity: seg.connectivity,
            pixel_level_exg: seg.pixel_level_exg,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("link_dist_mm", self.link_dist_mm > 0.0),
            ("gray", self.gray > 0.0 && self.gray <= 255.0),
            ("sharpen_sigma", self.sharpen_sigma > 0.0),
            ("sharpen_amount", self.sharpen_amount >= 0.0),
            ("t_exg", self.t_exg.is_finite()),
            ("min_blob_px", self.min_blob_px >= 1),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(Error::Config(format!("invalid value for `{name}`"))),
            None => Ok(()),
        }
    }

    pub fn segmentation(&self) -> SegmentationConfig {
        SegmentationConfig {
            sharpen_radius: self.sharpen_sigma,
            sharpen_amount: self.sharpen_amount,
            t_exg: self.t_exg,
            min_blob_px: self.min_blob_px,
            pixel_level_exg: self.pixel_level_exg,
            rim_recovery: self.rim_recovery,
            split_mixed_blobs: self.split_mixed_blobs,
            connectivity: self.connectivity,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_defaults() {
        let c = PipelineConfig::default();
        assert_eq!(c.t_exg, 25.0);
        assert_eq!(c.min_blob_px, 25);
        assert_eq!(c.link_dist_mm, 5.0);
        assert_eq!(c.gray, 155.0);
        assert_eq!((c.sharpen_sigma, c.sharpen_amount), (1.0, 0.8));
        assert_eq!(c.search_radius, 20);
    }

    #[test]
    fn partial_toml_and_unknown_keys() {
        let c: PipelineConfig = toml::from_str("t_exg = 30.0\n").unwrap();
        assert_eq!(c.t_exg, 30.0);
        assert_eq!(c.min_blob_px, 25);
        assert!(toml::from_str::<PipelineConfig>("t_egx = 30.0\n").is_err());
        let bad: PipelineConfig = toml::from_str("link_dist_mm = -1.0\n").unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn doc_example_parses_to_defaults() {
        let doc = "t_exg = 25.0\nmin_blob_px = 25\nlink_dist_mm = 5.0\ngray = 155.0\nsharpen_sigma = 1.0\n\
                   sharpen_amount = 0.8\nsearch_radius = 20\nrim_recovery = true\n\
                   split_mixed_blobs = true\nconnectivity = \"eight\"\npixel_level_exg = false\n";
        assert_eq!(
            toml::from_str::<PipelineConfig>(doc).unwrap(),
            PipelineConfig::default()
        );
    }
}
