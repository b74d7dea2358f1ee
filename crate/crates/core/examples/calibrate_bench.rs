//! Build a calibration profile from an empty-bench frame, then recover the
//! camera drift of a later acquisition from the centering marker.
//!
//! ```sh
//! cargo run --release --example calibrate_bench
//! ```

use seedkin::calibration::{build_profile, locate_center_marker};
use seedkin::synth::{default_schedule, Scene, SceneConfig};

fn main() -> seedkin::Result<()> {
    let config = SceneConfig {
        drift_px: 15,
        ..SceneConfig::default()
    };
    let scene = Scene::new(config, &default_schedule(2))?;

    let doc = scene.profile_document(0)?;
    let profile = build_profile(&doc, &scene.calibration_frame(0))?;
    println!(
        "{}: marker {:.0} mm^2 covers {} px, k_conv = {:.5} mm^2/px",
        profile.camera_id, profile.marker_physical_area, profile.marker_pixel_count, profile.k_conv
    );
    for (id, mask) in &profile.replicate_masks {
        println!(
            "  replicate {id}: {} px ({:.0} mm^2)",
            mask.count(),
            mask.count() as f64 * profile.k_conv
        );
    }

    for (e, frame) in scene.truth().frames.iter().take(5).enumerate() {
        let offset = locate_center_marker(&scene.render(0, e), &profile, 20)?;
        println!(
            "t = {:>3} h  found ({:+}, {:+}) ncc {:.3}   applied {:?}",
            frame.t, offset.dx, offset.dy, offset.correlation, frame.drift
        );
    }
    Ok(())
}
