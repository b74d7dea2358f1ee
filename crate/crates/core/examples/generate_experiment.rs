//! Write a small synthetic experiment to disk, ready for the command-line
//! tool:
//!
//! ```sh
//! cargo run --release --example generate_experiment -- /tmp/exp
//! seedkin calibrate --quads /tmp/exp/profiles/cam1.json \
//!     --image /tmp/exp/calibration/cam1.png --profile-dir /tmp/exp/calibrated
//! seedkin analyze --manifest /tmp/exp/manifest.csv --profile-dir /tmp/exp/calibrated \
//!     --manual-counts /tmp/exp/manual_counts.csv --out-dir /tmp/exp/out --plots
//! ```

use std::path::PathBuf;

use seedkin::synth::{default_schedule, export_experiment, Scene, SceneConfig};

fn main() -> seedkin::Result<()> {
    let root: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("seedkin-experiment"));
    let config = SceneConfig {
        cameras: 1,
        replicates_per_camera: 4,
        germination_fractions: vec![0.5, 0.7, 0.9, 1.0],
        ..SceneConfig::default()
    };
    let scene = Scene::new(config, &default_schedule(5))?;
    let layout = export_experiment(&scene, &root, 0)?;

    println!("wrote {}", layout.root.display());
    for path in [&layout.scene, &layout.manifest, &layout.truth, &layout.manual_counts] {
        println!("  {}", path.display());
    }
    println!("  {}  (authored profiles)", layout.profile_dir.display());
    println!("  {}", layout.calibration_dir.display());
    println!("  {}  ({} frames)", layout.frame_dir.display(), scene.times().len());
    for ((camera, replicate), n) in scene.truth().final_counts() {
        println!("{camera} replicate {replicate}: {n} seedlings");
    }
    Ok(())
}
