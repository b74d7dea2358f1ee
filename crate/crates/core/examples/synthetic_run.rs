//! End-to-end run on a synthetic experiment, scored against its ground truth.
//!
//! ```sh
//! cargo run --release --example synthetic_run -- [drift_px] [seed]
//! ```

use std::collections::BTreeMap;
use std::time::Instant;

use seedkin::calibration::{build_profile, CalibrationProfile};
use seedkin::pipeline::{run_with_loader, Manifest, ManifestRow, ManualCounts, PipelineConfig};
use seedkin::synth::{default_schedule, Scene, SceneConfig};

fn main() -> seedkin::Result<()> {
    let mut args = std::env::args().skip(1);
    let drift: u32 = args.next().map(|s| s.parse().expect("drift_px")).unwrap_or(0);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(7);

    let start = Instant::now();
    let config = SceneConfig {
        germination_fractions: SceneConfig::spread_fractions(0.5, 1.0, 12),
        drift_px: drift,
        rng_seed: seed,
        ..SceneConfig::default()
    };
    let scene = Scene::new(config, &default_schedule(10))?;
    let truth = scene.truth();

    let mut profiles = BTreeMap::new();
    for (c, id) in scene.camera_ids().iter().enumerate() {
        let doc = scene.profile_document(c)?;
        let profile: CalibrationProfile = build_profile(&doc, &scene.calibration_frame(c))?;
        println!("{id}: k_conv = {:.5} mm^2/px", profile.k_conv);
        profiles.insert(id.clone(), profile);
    }

    let mut rows = Vec::new();
    for id in scene.camera_ids() {
        for &t in scene.times() {
            rows.push(ManifestRow {
                camera: id.clone(),
                path: format!("{id}/{t}.png").into(),
                timestamp: String::new(),
                t_hours: t,
            });
        }
    }
    let manifest = Manifest::new(rows)?;
    let manual = ManualCounts {
        counts: truth.final_counts(),
    };
    let index = |row: &ManifestRow| {
        let c = scene.camera_ids().iter().position(|id| *id == row.camera).unwrap();
        let e = scene.times().iter().position(|&t| t == row.t_hours).unwrap();
        (c, e)
    };
    let report = run_with_loader(
        &manifest,
        &profiles,
        &PipelineConfig::default(),
        Some(&manual),
        0,
        |row| {
            let (c, e) = index(row);
            Ok(scene.render(c, e))
        },
    )?;

    let v = report.validation.as_ref().unwrap();
    println!(
        "frames {} processed, {} flagged",
        report.frames_processed,
        report.flagged.len()
    );
    for (key, auto) in report.final_counts() {
        println!(
            "  {} r{:<2} auto {:>2}  manual {:>2}",
            key.0, key.1, auto, manual.counts[&key]
        );
    }
    println!("R^2 = {:.4}, RMSE = {:.3}", v.r2.unwrap_or(f64::NAN), v.rmse);

    let germinated = truth.seeds.iter().filter(|s| s.germinated).count();
    let overlapping = truth
        .seeds
        .iter()
        .filter(|s| s.germinated && s.overlaps_neighbor)
        .count();
    println!(
        "overlapping at last epoch: {:.1}%",
        100.0 * overlapping as f64 / germinated as f64
    );

    let mut within = 0;
    let mut total = 0;
    for r in &report.replicates {
        for ev in &r.events {
            total += 1;
            let c = ev.polygon.polygon.centroid();
            let nearest = truth
                .seeds
                .iter()
                .filter(|s| s.camera == r.camera && s.replicate == r.replicate && s.germinated)
                .min_by(|a, b| {
                    let d = |s: &&seedkin::synth::SeedTruth| (s.position_px[0] - c.x).hypot(s.position_px[1] - c.y);
                    d(a).total_cmp(&d(b))
                });
            if let Some(s) = nearest {
                let want = truth.first_epoch_at_or_after(s.emergence_time.unwrap());
                let got = truth.times.iter().position(|&t| t == ev.emergence_time);
                if let (Some(w), Some(g)) = (want, got) {
                    if w.abs_diff(g) <= 1 {
                        within += 1;
                    }
                }
            }
        }
    }
    println!(
        "events within one epoch: {within}/{total} = {:.1}%",
        100.0 * within as f64 / total.max(1) as f64
    );

    let mut worst: f64 = 0.0;
    for a in &truth.areas {
        if a.leaf_area_mm2 < 100.0 {
            continue;
        }
        let r = report.replicate(&a.camera, a.replicate).unwrap();
        let i = r.vigor.times.iter().position(|&t| t == a.t).unwrap();
        let err = (r.vigor.leaf_area_mm2[i] - a.leaf_area_mm2).abs() / a.leaf_area_mm2;
        worst = worst.max(err);
    }
    println!("worst leaf-area error: {:.2}%", 100.0 * worst);
    println!("elapsed {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
