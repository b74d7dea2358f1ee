//! Per-camera geometry: lens undistortion, replicate masks, pixel-to-area
//! conversion and drift correction against the centering marker.

mod distortion;
mod marker;
mod profile;

pub use distortion::{distort_frame, undistort_frame, DistortionModel};
pub use marker::{
    align_frame, locate_center_marker, translate, FrameOffset, DEFAULT_SEARCH_RADIUS, MIN_MARKER_CORRELATION,
};
pub use profile::{
    build_profile, conversion_factor, CalibrationProfile, DerivedCalibration, MarkerSpec, MarkerTemplate,
    ProfileDocument, ReplicateId, ReplicateQuad, TemplateDocument, PROFILE_SCHEMA_VERSION, TEMPLATE_MARGIN_PX,
};
