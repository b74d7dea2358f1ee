use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use super::manifest::{Manifest, ManifestRow, ManualCounts};
use crate::calibration::{
    align_frame, locate_center_marker, undistort_frame, CalibrationProfile, FrameOffset, ProfileDocument, ReplicateId,
};
use crate::clustering::{cluster_blobs, polygonize, ClusterPolygon};
use crate::error::{Error, Result};
use crate::imagecore::{label_blobs, RgbImage};
use crate::kinetics::{
    emergence_events, germination_curve, leaf_area, EmergenceEvent, Epoch, GerminationSeries, ValidationReport,
    VigorSeries,
};
use crate::radiometry::{normalize_colors, sample_gray};
use crate::segmentation::segment_frame;

/// What one frame contributes to one replicate's timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateObservation {
    pub replicate: ReplicateId,
    pub green_px: usize,
    pub leaf_area_mm2: f64,
    pub polygons: Vec<ClusterPolygon>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    pub camera: String,
    pub t: f64,
    pub offset: FrameOffset,
    pub replicates: Vec<ReplicateObservation>,
}

/// Full per-frame chain: undistort, re-center on the marker, normalize
/// against the gray patch, segment, then measure and polygonize each
/// replicate.
pub fn process_frame(
    raw: &RgbImage,
    profile: &CalibrationProfile,
    t: f64,
    cfg: &PipelineConfig,
) -> Result<FrameResult> {
    if (raw.width(), raw.height()) != (profile.width, profile.height) {
        return Err(Error::Config(format!(
            "frame is {}x{}, profile {} expects {}x{}",
            raw.width(),
            raw.height(),
            profile.camera_id,
            profile.width,
            profile.height
        )));
    }
    let undistorted = undistort_frame(raw, &profile.distortion);
    let offset = locate_center_marker(&undistorted, profile, cfg.search_radius)?;
    let aligned = align_frame(&undistorted, &offset);
    let gray = sample_gray(&aligned, profile.gray_center)?;
    let normalized = normalize_colors(&aligned, &gray, cfg.gray)?;
    let masks = segment_frame(&normalized, profile, t, &cfg.segmentation())?;

    let mut replicates = Vec::with_capacity(masks.len());
    for m in masks {
        let blobs = label_blobs(&m.mask, cfg.min_blob_px);
        let polygons = cluster_blobs(&blobs, cfg.link_dist_mm, profile.k_conv)?
            .iter()
            .map(|c| polygonize(c, &profile.camera_id, m.replicate, t))
            .collect::<Result<Vec<_>>>()?;
        replicates.push(ReplicateObservation {
            replicate: m.replicate,
            green_px: m.mask.count(),
            leaf_area_mm2: leaf_area(&m.mask, profile.k_conv),
            polygons,
        });
    }
    Ok(FrameResult {
        camera: profile.camera_id.clone(),
        t,
        offset,
        replicates,
    })
}

/// A manifest frame that was skipped; the run continues without it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlaggedFrame {
    pub camera: String,
    pub t_hours: f64,
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateReport {
    pub camera: String,
    pub replicate: ReplicateId,
    pub germination: GerminationSeries,
    pub vigor: VigorSeries,
    pub events: Vec<EmergenceEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: PipelineConfig,
    pub frames_total: usize,
    pub frames_processed: usize,
    pub flagged: Vec<FlaggedFrame>,
    /// Sorted by camera, then replicate id.
    pub replicates: Vec<ReplicateReport>,
    pub validation: Option<ValidationReport>,
}

impl RunReport {
    pub fn replicate(&self, camera: &str, replicate: ReplicateId) -> Option<&ReplicateReport> {
        self.replicates
            .iter()
            .find(|r| r.camera == camera && r.replicate == replicate)
    }

    /// Final cumulative count per replicate.
    pub fn final_counts(&self) -> BTreeMap<(String, ReplicateId), u32> {
        self.replicates
            .iter()
            .map(|r| ((r.camera.clone(), r.replicate), r.germination.final_count()))
            .collect()
    }
}

/// Loads `<dir>/<camera>.json` for every camera in the manifest. A missing
/// or uncalibrated profile is reported against the first row that needs it.
pub fn load_profiles(dir: &Path, manifest: &Manifest) -> Result<BTreeMap<String, CalibrationProfile>> {
    let mut profiles = BTreeMap::new();
    for (i, row) in manifest.rows.iter().enumerate() {
        if profiles.contains_key(&row.camera) {
            continue;
        }
        let path = dir.join(format!("{}.json", row.camera));
        if !path.is_file() {
            return Err(Error::Config(format!(
                "no calibration profile for camera {} (expected {})",
                row.camera,
                path.display()
            ))
            .at_row(i + 1));
        }
        let profile = ProfileDocument::load(&path)
            .and_then(|d| CalibrationProfile::from_document(&d))
            .map_err(|e| e.at_row(i + 1))?;
        if profile.camera_id != row.camera {
            return Err(Error::Config(format!(
                "{} describes camera {}, not {}",
                path.display(),
                profile.camera_id,
                row.camera
            ))
            .at_row(i + 1));
        }
        profiles.insert(row.camera.clone(), profile);
    }
    Ok(profiles)
}

/// Runs the pipeline, loading each frame from its manifest path.
pub fn run_pipeline(
    manifest: &Manifest,
    profiles: &BTreeMap<String, CalibrationProfile>,
    config: &PipelineConfig,
    manual: Option<&ManualCounts>,
    jobs: usize,
) -> Result<RunReport> {
    run_with_loader(manifest, profiles, config, manual, jobs, |row| {
        RgbImage::load(&row.path)
    })
}

/// Runs the pipeline with frames supplied by `load`, which is called from
/// worker threads. At most `jobs` frames are in flight at once; 0 means one
/// worker per core.
pub fn run_with_loader<F>(
    manifest: &Manifest,
    profiles: &BTreeMap<String, CalibrationProfile>,
    config: &PipelineConfig,
    manual: Option<&ManualCounts>,
    jobs: usize,
    load: F,
) -> Result<RunReport>
where
    F: Fn(&ManifestRow) -> Result<RgbImage> + Sync,
{
    if manifest.rows.is_empty() {
        return Err(Error::NoFrames);
    }
    manifest.validate()?;
    config.validate()?;
    for (i, row) in manifest.rows.iter().enumerate() {
        if !profiles.contains_key(&row.camera) {
            return Err(Error::Config(format!("no calibration profile for camera {}", row.camera)).at_row(i + 1));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<Result<FrameResult>> = pool.install(|| {
        manifest
            .rows
            .par_iter()
            .enumerate()
            .map(|(i, row)| {
                let frame = load(row).map_err(|e| e.at_row(i + 1))?;
                let profile = &profiles[&row.camera];
                process_frame(&frame, profile, row.t_hours, config).map_err(|e| e.at_row(i + 1))
            })
            .collect()
    });

    let mut flagged = Vec::new();
    let mut results = Vec::new();
    for (row, outcome) in manifest.rows.iter().zip(outcomes) {
        match outcome {
            Ok(r) => results.push(r),
            Err(e) if !e.is_configuration() => {
                warn!("{}: frame skipped: {e}", row.path.display());
                flagged.push(FlaggedFrame {
                    camera: row.camera.clone(),
                    t_hours: row.t_hours,
                    path: row.path.clone(),
                    reason: e.to_string(),
                });
            }
            Err(e) => return Err(e),
        }
    }
    let frames_processed = results.len();
    info!("{frames_processed} of {} frames processed", manifest.rows.len());

    let mut replicates = assemble(profiles, manifest, results)?;
    replicates.sort_by(|a, b| (&a.camera, a.replicate).cmp(&(&b.camera, b.replicate)));
    let validation = manual
        .map(|m| {
            let auto = replicates
                .iter()
                .map(|r| ((r.camera.clone(), r.replicate), r.germination.final_count()))
                .collect();
            m.compare(&auto)
        })
        .transpose()?;

    Ok(RunReport {
        config: config.clone(),
        frames_total: manifest.rows.len(),
        frames_processed,
        flagged,
        replicates,
        validation,
    })
}

/// Per-replicate timelines sorted by time, then kinetics.
fn assemble(
    profiles: &BTreeMap<String, CalibrationProfile>,
    manifest: &Manifest,
    mut results: Vec<FrameResult>,
) -> Result<Vec<ReplicateReport>> {
    results.sort_by(|a, b| a.camera.cmp(&b.camera).then(a.t.total_cmp(&b.t)));
    let mut timelines: BTreeMap<(String, ReplicateId), Vec<(f64, ReplicateObservation)>> = BTreeMap::new();
    for camera in manifest.cameras() {
        for &id in profiles[camera].replicate_quads.keys() {
            timelines.insert((camera.to_string(), id), Vec::new());
        }
    }
    for r in results {
        for obs in r.replicates {
            timelines
                .get_mut(&(r.camera.clone(), obs.replicate))
                .expect("replicates come from the profile")
                .push((r.t, obs));
        }
    }

    timelines
        .into_iter()
        .map(|((camera, replicate), line)| {
            let times: Vec<f64> = line.iter().map(|(t, _)| *t).collect();
            let areas: Vec<f64> = line.iter().map(|(_, o)| o.leaf_area_mm2).collect();
            let epochs: Vec<Epoch> = line
                .into_iter()
                .map(|(t, o)| Epoch {
                    t,
                    polygons: o.polygons,
                })
                .collect();
            let events = emergence_events(&epochs)?;
            Ok(ReplicateReport {
                germination: germination_curve(&camera, replicate, &events, &times),
                vigor: VigorSeries {
                    camera: camera.clone(),
                    replicate,
                    times,
                    leaf_area_mm2: areas,
                },
                events,
                camera,
                replicate,
            })
        })
        .collect()
}
