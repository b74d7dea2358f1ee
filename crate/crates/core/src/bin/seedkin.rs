use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{info, warn};

use seedkin::calibration::{build_profile, ProfileDocument};
use seedkin::imagecore::RgbImage;
use seedkin::pipeline::{
    load_profiles, load_report, run_pipeline, write_outputs, write_plots, Manifest, ManualCounts, PipelineConfig,
    REPORT_JSON,
};
use seedkin::synth::{default_schedule, export_experiment, Scene, SceneConfig};
use seedkin::{Error, Result};

#[derive(Parser)]
#[command(
    name = "seedkin",
    version,
    about = "Germination kinetics and seedling vigor from time-lapse images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure the marker in a calibration image and write a ready-to-use profile.
    Calibrate {
        /// Authored profile JSON: lens model, replicate quads, marker quad, gray patch.
        #[arg(long)]
        quads: PathBuf,
        /// Calibration image of the bench from the same camera.
        #[arg(long)]
        image: PathBuf,
        /// Directory receiving `<camera>.json`.
        #[arg(long)]
        profile_dir: PathBuf,
    },
    /// Process every frame of a manifest and write counts, areas and events.
    Analyze {
        #[arg(long)]
        manifest: PathBuf,
        /// Directory holding one calibrated `<camera>.json` per camera.
        #[arg(long)]
        profile_dir: PathBuf,
        /// Pipeline settings (TOML); defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        /// `camera,replicate,count` table to validate the final counts against.
        #[arg(long)]
        manual_counts: Option<PathBuf>,
        /// Frames processed concurrently; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Also write the SVG curves.
        #[arg(long)]
        plots: bool,
    },
    /// Render a synthetic experiment with known ground truth.
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        /// Scene description (TOML); defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the scene's rng_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Days of acquisitions, five per day.
        #[arg(long, default_value_t = 10)]
        days: usize,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Compare two `camera,replicate,count` tables.
    Validate {
        /// Automated counts: a counts CSV or an analyze `report.json`.
        #[arg(long)]
        counts: PathBuf,
        #[arg(long)]
        manual_counts: PathBuf,
        /// Write `validation.json` here as well as printing it.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Draw germination and vigor curves from an analyze output directory.
    Report {
        /// Directory containing `report.json`; plots are written next to it.
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_configuration() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Calibrate {
            quads,
            image,
            profile_dir,
        } => calibrate(&quads, &image, &profile_dir),
        Command::Analyze {
            manifest,
            profile_dir,
            config,
            out_dir,
            manual_counts,
            jobs,
            plots,
        } => {
            let manifest = Manifest::load(&manifest)?;
            let config = match config {
                Some(p) => PipelineConfig::load(p)?,
                None => PipelineConfig::default(),
            };
            let profiles = load_profiles(&profile_dir, &manifest)?;
            let manual = manual_counts.map(ManualCounts::load).transpose()?;
            let report = run_pipeline(&manifest, &profiles, &config, manual.as_ref(), jobs)?;
            write_outputs(&report, &out_dir)?;
            if plots {
                write_plots(&report, &out_dir)?;
            }
            if !report.flagged.is_empty() {
                warn!("{} of {} frames flagged", report.flagged.len(), report.frames_total);
            }
            if let Some(v) = &report.validation {
                print_validation(v);
            }
            info!("results in {}", out_dir.display());
            Ok(())
        }
        Command::Synth {
            out_dir,
            config,
            seed,
            days,
            jobs,
        } => {
            let mut scene_config = match config {
                Some(p) => SceneConfig::load(p)?,
                None => SceneConfig::default(),
            };
            if let Some(s) = seed {
                scene_config.rng_seed = s;
            }
            if days == 0 {
                return Err(Error::Config("--days must be at least 1".into()));
            }
            let scene = Scene::new(scene_config, &default_schedule(days))?;
            let layout = export_experiment(&scene, &out_dir, jobs)?;
            info!(
                "{} frames for {} cameras in {}",
                scene.times().len() * scene.camera_ids().len(),
                scene.camera_ids().len(),
                layout.root.display()
            );
            Ok(())
        }
        Command::Validate {
            counts,
            manual_counts,
            out_dir,
        } => {
            let auto = if counts.extension().is_some_and(|e| e == "json") {
                load_report(&counts)?.final_counts()
            } else {
                ManualCounts::load(&counts)?.counts
            };
            let v = ManualCounts::load(&manual_counts)?.compare(&auto)?;
            print_validation(&v);
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                let path = dir.join("validation.json");
                std::fs::write(&path, serde_json::to_string_pretty(&v)? + "\n").map_err(|e| Error::io(&path, e))?;
            }
            Ok(())
        }
        Command::Report { out_dir } => {
            let report = load_report(&out_dir.join(REPORT_JSON))?;
            write_plots(&report, &out_dir)
        }
    }
}

fn calibrate(quads: &Path, image: &Path, profile_dir: &Path) -> Result<()> {
    let doc = ProfileDocument::load(quads)?;
    let frame = RgbImage::load(image)?;
    let profile = build_profile(&doc, &frame)?;
    std::fs::create_dir_all(profile_dir).map_err(|e| Error::io(profile_dir, e))?;
    let path = profile_dir.join(format!("{}.json", profile.camera_id));
    profile.to_document().save(&path)?;
    info!(
        "{}: marker {} px, k_conv {:.5} mm^2/px -> {}",
        profile.camera_id,
        profile.marker_pixel_count,
        profile.k_conv,
        path.display()
    );
    Ok(())
}

fn print_validation(v: &seedkin::kinetics::ValidationReport) {
    match v.r2 {
        Some(r2) => println!("n = {}, RMSE = {:.3}, R^2 = {:.4}", v.n, v.rmse, r2),
        None => println!(
            "n = {}, RMSE = {:.3}, R^2 undefined (manual counts are constant)",
            v.n, v.rmse
        ),
    }
}
