//! Segment one late acquisition into per-replicate green masks and compare
//! the projected leaf area with the synthetic ground truth.
//!
//! Pass `--pixel` to classify pixels individually instead of by blob mean.

use seedkin::calibration::{align_frame, build_profile, locate_center_marker, undistort_frame};
use seedkin::kinetics::leaf_area;
use seedkin::pipeline::PipelineConfig;
use seedkin::radiometry::{normalize_colors, sample_gray};
use seedkin::segmentation::segment_frame;
use seedkin::synth::{default_schedule, Scene, SceneConfig};

fn main() -> seedkin::Result<()> {
    let cfg = PipelineConfig {
        pixel_level_exg: std::env::args().any(|a| a == "--pixel"),
        ..PipelineConfig::default()
    };

    let scene = Scene::new(SceneConfig::default(), &default_schedule(6))?;
    let profile = build_profile(&scene.profile_document(0)?, &scene.calibration_frame(0))?;
    let epoch = scene.times().len() - 1;
    let t = scene.times()[epoch];

    let raw = undistort_frame(&scene.render(0, epoch), &profile.distortion);
    let aligned = align_frame(&raw, &locate_center_marker(&raw, &profile, cfg.search_radius)?);
    let gray = sample_gray(&aligned, profile.gray_center)?;
    let frame = normalize_colors(&aligned, &gray, cfg.gray)?;

    println!("t = {t} h");
    for green in segment_frame(&frame, &profile, t, &cfg.segmentation())? {
        let truth = scene
            .truth()
            .areas
            .iter()
            .find(|a| a.replicate == green.replicate && a.t == t)
            .expect("truth for every replicate");
        let area = leaf_area(&green.mask, profile.k_conv);
        println!(
            "replicate {:>2}: {:>5} px  {:>7.1} mm^2  truth {:>7.1} mm^2  ({:+.1}%)",
            green.replicate,
            green.mask.count(),
            area,
            truth.leaf_area_mm2,
            100.0 * (area - truth.leaf_area_mm2) / truth.leaf_area_mm2.max(1e-9)
        );
    }
    Ok(())
}
