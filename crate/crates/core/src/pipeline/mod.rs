//! Batch analysis over an image manifest: per-frame processing on a bounded
//! worker pool, per-replicate kinetics, and CSV/JSON/SVG outputs.

mod config;
mod manifest;
mod report;
mod run;

pub use config::PipelineConfig;
pub use manifest::{Manifest, ManifestRow, ManualCounts};
pub use report::{
    load_report, mean_sd, write_outputs, write_plots, EVENTS_CSV, GERMINATION_CSV, GERMINATION_SVG, REPORT_JSON,
    VIGOR_CSV, VIGOR_SVG,
};
pub use run::{
    load_profiles, process_frame, run_pipeline, run_with_loader, FlaggedFrame, FrameResult, ReplicateObservation,
    ReplicateReport, RunReport,
};
