//! Emergence detection across acquisitions, germination and vigor series,
//! and count validation statistics.

use serde::{Deserialize, Serialize};

use crate::calibration::ReplicateId;
use crate::clustering::ClusterPolygon;
use crate::error::{Error, Result};
use crate::imagecore::{polygons_intersect, BinaryMask};

/// Polygons of one replicate at one acquisition.
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch {
    pub t: f64,
    pub polygons: Vec<ClusterPolygon>,
}

/// A polygon with no positive-area overlap with any earlier polygon of the
/// same replicate: the first appearance of a seedling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmergenceEvent {
    pub camera: String,
    pub replicate: ReplicateId,
    pub emergence_time: f64,
    pub polygon: ClusterPolygon,
}

/// Emergence events of one replicate.
///
/// Walks the timeline from the latest acquisition backwards; each polygon is
/// compared with every polygon of every earlier acquisition and becomes an
/// event only if none overlaps it. Returned in chronological order, then in
/// the within-epoch polygon order. `timeline` must be sorted by time.
pub fn emergence_events(timeline: &[Epoch]) -> Result<Vec<EmergenceEvent>> {
    if timeline.windows(2).any(|w| !(w[0].t < w[1].t)) {
        return Err(Error::InvalidInput(
            "timeline epochs must be strictly increasing in time".into(),
        ));
    }
    let boxes: Vec<Vec<_>> = timeline
        .iter()
        .map(|e| e.polygons.iter().map(|p| p.polygon.bbox()).collect())
        .collect();

    let mut per_epoch: Vec<Vec<EmergenceEvent>> = vec![Vec::new(); timeline.len()];
    for t in (0..timeline.len()).rev() {
        for (i, cand) in timeline[t].polygons.iter().enumerate() {
            let cb = &boxes[t][i];
            let overlapped =
                (0..t).rev().any(|ts| {
                    timeline[ts].polygons.iter().zip(&boxes[ts]).any(|(earlier, eb)| {
                        cb.overlaps_open(eb) && polygons_intersect(&cand.polygon, &earlier.polygon)
                    })
                });
            if !overlapped {
                per_epoch[t].push(EmergenceEvent {
                    camera: cand.camera.clone(),
                    replicate: cand.replicate,
                    emergence_time: timeline[t].t,
                    polygon: cand.clone(),
                });
            }
        }
    }
    Ok(per_epoch.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GerminationSeries {
    pub camera: String,
    pub replicate: ReplicateId,
    pub times: Vec<f64>,
    /// Cumulative emerged seedlings at each time.
    pub counts: Vec<u32>,
}

impl GerminationSeries {
    pub fn final_count(&self) -> u32 {
        self.counts.last().copied().unwrap_or(0)
    }
}

pub fn germination_curve(
    camera: &str,
    replicate: ReplicateId,
    events: &[EmergenceEvent],
    times: &[f64],
) -> GerminationSeries {
    let counts = times
        .iter()
        .map(|&t| events.iter().filter(|e| e.emergence_time <= t).count() as u32)
        .collect();
    GerminationSeries {
        camera: camera.to_string(),
        replicate,
        times: times.to_vec(),
        counts,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VigorSeries {
    pub camera: String,
    pub replicate: ReplicateId,
    pub times: Vec<f64>,
    pub leaf_area_mm2: Vec<f64>,
}

/// Projected green area in mm^2.
pub fn leaf_area(green: &BinaryMask, k_conv: f64) -> f64 {
    k_conv * green.count() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// `(automated, manual)` per replicate.
    pub pairs: Vec<(f64, f64)>,
    /// `None` when the manual counts have zero variance.
    pub r2: Option<f64>,
    pub rmse: f64,
    pub n: usize,
}

/// RMSE and coefficient of determination `1 - SS_res / SS_tot`, with
/// `SS_tot` taken about the mean of the manual counts.
pub fn validate_counts(auto: &[f64], manual: &[f64]) -> Result<ValidationReport> {
    if auto.len() != manual.len() {
        return Err(Error::InvalidInput(format!(
            "{} automated counts vs {} manual counts",
            auto.len(),
            manual.len()
        )));
    }
    let n = auto.len();
    if n < 2 {
        return Err(Error::InvalidInput("validation needs at least two replicates".into()));
    }
    let ss_res: f64 = auto.iter().zip(manual).map(|(a, m)| (a - m).powi(2)).sum();
    let mean = manual.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = manual.iter().map(|m| (m - mean).powi(2)).sum();
    Ok(ValidationReport {
        pairs: auto.iter().copied().zip(manual.iter().copied()).collect(),
        r2: (ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot),
        rmse: (ss_res / n as f64).sqrt(),
        n,
    })
}
