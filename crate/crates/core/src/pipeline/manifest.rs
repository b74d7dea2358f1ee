use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calibration::ReplicateId;
use crate::error::{Error, Result};
use crate::kinetics::{validate_counts, ValidationReport};

/// One acquisition: `camera,path,timestamp,t_hours`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub camera: String,
    pub path: PathBuf,
    /// Wall-clock label, carried through to reports but not interpreted.
    pub timestamp: String,
    /// Hours since sowing.
    pub t_hours: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub rows: Vec<ManifestRow>,
}

impl Manifest {
    pub fn new(rows: Vec<ManifestRow>) -> Result<Self> {
        let m = Self { rows };
        m.validate()?;
        Ok(m)
    }

    /// Reads a manifest CSV. Relative frame paths resolve against the
    /// manifest's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let base = path.parent().unwrap_or(Path::new(""));
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["camera", "path", "timestamp", "t_hours"] {
            return Err(Error::Config(format!(
                "{}: expected header `camera,path,timestamp,t_hours`",
                path.display()
            )));
        }
        let mut rows = Vec::new();
        for (i, rec) in reader.deserialize::<ManifestRow>().enumerate() {
            let mut row = rec.map_err(|e| Error::Config(e.to_string()).at_row(i + 1))?;
            if row.path.is_relative() {
                row.path = base.join(&row.path);
            }
            rows.push(row);
        }
        Self::new(rows)
    }

    /// Writes the manifest with paths relative to `base` where possible.
    pub fn save(&self, path: impl AsRef<Path>, base: Option<&Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        for row in &self.rows {
            let mut row = row.clone();
            if let Some(rel) = base.and_then(|b| row.path.strip_prefix(b).ok()) {
                row.path = rel.to_path_buf();
            }
            w.serialize(row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (i, row) in self.rows.iter().enumerate() {
            let fail = |m: String| Err(Error::Config(m).at_row(i + 1));
            if row.camera.is_empty() {
                return fail("empty camera id".into());
            }
            if !(row.t_hours.is_finite() && row.t_hours >= 0.0) {
                return fail(format!("t_hours must be finite and non-negative, got {}", row.t_hours));
            }
            if !seen.insert((row.camera.clone(), row.t_hours.to_bits())) {
                return fail(format!(
                    "duplicate acquisition for camera {} at t={}",
                    row.camera, row.t_hours
                ));
            }
        }
        Ok(())
    }

    pub fn cameras(&self) -> BTreeSet<&str> {
        self.rows.iter().map(|r| r.camera.as_str()).collect()
    }
}

/// Manually counted seedlings per replicate: `camera,replicate,count`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ManualCounts {
    pub counts: BTreeMap<(String, ReplicateId), u32>,
}

#[derive(Serialize, Deserialize)]
struct CountRow {
    camera: String,
    replicate: ReplicateId,
    count: u32,
}

impl ManualCounts {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut counts = BTreeMap::new();
        for (i, rec) in reader.deserialize::<CountRow>().enumerate() {
            let r = rec.map_err(|e| Error::Config(format!("{}: row {}: {e}", path.display(), i + 1)))?;
            if counts.insert((r.camera.clone(), r.replicate), r.count).is_some() {
                return Err(Error::Config(format!(
                    "{}: duplicate count for camera {} replicate {}",
                    path.display(),
                    r.camera,
                    r.replicate
                )));
            }
        }
        Ok(Self { counts })
    }

    /// RMSE and R^2 of `auto` against these counts. Every automated
    /// replicate needs a manual count; manual-only entries are ignored.
    pub fn compare(&self, auto: &BTreeMap<(String, ReplicateId), u32>) -> Result<ValidationReport> {
        let mut a = Vec::with_capacity(auto.len());
        let mut m = Vec::with_capacity(auto.len());
        for (key, &count) in auto {
            let manual = self
                .counts
                .get(key)
                .ok_or_else(|| Error::Config(format!("no manual count for camera {} replicate {}", key.0, key.1)))?;
            a.push(count as f64);
            m.push(*manual as f64);
        }
        validate_counts(&a, &m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        for ((camera, replicate), &count) in &self.counts {
            w.serialize(CountRow {
                camera: camera.clone(),
                replicate: *replicate,
                count,
            })?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}
