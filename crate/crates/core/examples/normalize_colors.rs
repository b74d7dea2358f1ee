//! Per-channel illumination changes are undone by scaling every frame so the
//! gray reference patch reads the same value.

use seedkin::calibration::build_profile;
use seedkin::pipeline::PipelineConfig;
use seedkin::radiometry::{normalize_colors, sample_gray};
use seedkin::synth::{default_schedule, Scene, SceneConfig};

fn main() -> seedkin::Result<()> {
    let scene = Scene::new(SceneConfig::default(), &default_schedule(2))?;
    let profile = build_profile(&scene.profile_document(0)?, &scene.calibration_frame(0))?;
    let target = PipelineConfig::default().gray;

    println!("epoch  illumination          gray before            gray after");
    for (e, truth) in scene.truth().frames.iter().take(scene.times().len()).enumerate() {
        let raw = scene.render(0, e);
        let before = sample_gray(&raw, profile.gray_center)?;
        let after = sample_gray(&normalize_colors(&raw, &before, target)?, profile.gray_center)?;
        println!(
            "{e:>5}  {:<20}  {:<21}  {}",
            fmt3(truth.illumination),
            fmt3(before.mean_rgb),
            fmt3(after.mean_rgb)
        );
    }
    Ok(())
}

fn fmt3(v: [f64; 3]) -> String {
    format!("{:.2} {:.2} {:.2}", v[0], v[1], v[2])
}
