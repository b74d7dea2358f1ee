//! Writes a synthetic experiment to disk in the layout the CLI consumes.

use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate, NaiveDateTime};
use rayon::prelude::*;

use super::{Scene, SceneConfig};
use crate::error::{Error, Result};
use crate::pipeline::{Manifest, ManifestRow, ManualCounts};

/// Calendar day the synthetic seeds are sown on; only used for the manifest
/// timestamps.
pub const SOWING_DATE: (i32, u32, u32) = (2024, 3, 1);

/// Where [`export_experiment`] put things, all under one root.
///
/// ```text
/// scene.toml             the SceneConfig that produced everything
/// manifest.csv           camera,path,timestamp,t_hours
/// truth.json             GroundTruth
/// manual_counts.csv      final true counts, camera,replicate,count
/// profiles/<cam>.json    authored profile (quads, marker, gray patch)
/// calibration/<cam>.png  empty-bench frame for `calibrate`
/// frames/<cam>/NNN.png   one frame per acquisition epoch
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ExportLayout {
    pub root: PathBuf,
    pub scene: PathBuf,
    pub manifest: PathBuf,
    pub truth: PathBuf,
    pub manual_counts: PathBuf,
    pub profile_dir: PathBuf,
    pub calibration_dir: PathBuf,
    pub frame_dir: PathBuf,
}

impl ExportLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        let root = root.into();
        Self {
            scene: root.join("scene.toml"),
            manifest: root.join("manifest.csv"),
            truth: root.join("truth.json"),
            manual_counts: root.join("manual_counts.csv"),
            profile_dir: root.join("profiles"),
            calibration_dir: root.join("calibration"),
            frame_dir: root.join("frames"),
            root,
        }
    }

    pub fn profile(&self, camera: &str) -> PathBuf {
        self.profile_dir.join(format!("{camera}.json"))
    }

    pub fn calibration_image(&self, camera: &str) -> PathBuf {
        self.calibration_dir.join(format!("{camera}.png"))
    }

    pub fn frame(&self, camera: &str, epoch: usize) -> PathBuf {
        self.frame_dir.join(camera).join(format!("{epoch:03}.png"))
    }
}

/// `YYYY-MM-DDTHH:MM:SS` of the acquisition `t_hours` after sowing.
pub fn acquisition_timestamp(config: &SceneConfig, t_hours: f64) -> String {
    let (y, m, d) = SOWING_DATE;
    let sowing: NaiveDateTime = NaiveDate::from_ymd_opt(y, m, d)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid constant date");
    let seconds = ((config.sowing_clock_h + t_hours) * 3600.0).round() as i64;
    (sowing + Duration::seconds(seconds))
        .format("%Y-%m-%dT%H:%M:%S")
        .to_string()
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Renders every frame of `scene` and writes the experiment under `root`.
/// Frames are written by up to `jobs` workers; 0 means one per core.
pub fn export_experiment(scene: &Scene, root: &Path, jobs: usize) -> Result<ExportLayout> {
    let layout = ExportLayout::new(root);
    create_dir(&layout.profile_dir)?;
    create_dir(&layout.calibration_dir)?;
    for id in scene.camera_ids() {
        create_dir(&layout.frame_dir.join(id))?;
    }

    let config_text = toml::to_string(scene.config()).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(&layout.scene, config_text).map_err(|e| Error::io(&layout.scene, e))?;

    for (c, id) in scene.camera_ids().iter().enumerate() {
        scene.profile_document(c)?.save(layout.profile(id))?;
        scene.calibration_frame(c).save(layout.calibration_image(id))?;
    }

    let per_camera = scene.times().len();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        (0..scene.camera_ids().len() * per_camera)
            .into_par_iter()
            .try_for_each(|i| {
                let (c, e) = (i / per_camera, i % per_camera);
                scene.render(c, e).save(layout.frame(&scene.camera_ids()[c], e))
            })
    })?;

    let mut rows = Vec::with_capacity(scene.camera_ids().len() * per_camera);
    for id in scene.camera_ids() {
        for (e, &t) in scene.times().iter().enumerate() {
            rows.push(ManifestRow {
                camera: id.clone(),
                path: layout.frame(id, e),
                timestamp: acquisition_timestamp(scene.config(), t),
                t_hours: t,
            });
        }
    }
    Manifest::new(rows)?.save(&layout.manifest, Some(root))?;
    scene.truth().save(&layout.truth)?;
    ManualCounts {
        counts: scene.truth().final_counts(),
    }
    .save(&layout.manual_counts)?;
    Ok(layout)
}
