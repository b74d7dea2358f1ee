//! Seed-germination kinetics and seedling vigor from time-lapse top-view
//! images.
//!
//! Frames are undistorted, aligned on a centering marker and normalized
//! against a gray patch; plant tissue is segmented per replicate, grouped
//! into proximity clusters, and each cluster's polygon is compared with all
//! earlier acquisitions. Polygons with no earlier overlap mark seedling
//! emergence.

pub mod calibration;
pub mod clustering;
pub mod error;
pub mod imagecore;
pub mod kinetics;
pub mod pipeline;
pub mod radiometry;
pub mod segmentation;
pub mod synth;

pub use error::{Error, Result};
