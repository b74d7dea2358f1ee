use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::run::RunReport;
use crate::error::{Error, Result};

pub const GERMINATION_CSV: &str = "germination.csv";
pub const VIGOR_CSV: &str = "vigor.csv";
pub const EVENTS_CSV: &str = "events.csv";
pub const REPORT_JSON: &str = "report.json";
pub const GERMINATION_SVG: &str = "germination.svg";
pub const VIGOR_SVG: &str = "vigor.svg";

#[derive(Serialize)]
struct GerminationRow<'a> {
    camera: &'a str,
    replicate: u32,
    t_hours: f64,
    count: u32,
}

#[derive(Serialize)]
struct VigorRow<'a> {
    camera: &'a str,
    replicate: u32,
    t_hours: f64,
    leaf_area_mm2: f64,
}

#[derive(Serialize)]
struct EventRow<'a> {
    camera: &'a str,
    replicate: u32,
    emergence_t_hours: f64,
    polygon_wkt: String,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Writes the three CSV tables and `report.json` into `out_dir`.
pub fn write_outputs(report: &RunReport, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let path = out_dir.join(GERMINATION_CSV);
    let mut w = csv_writer(&path)?;
    for r in &report.replicates {
        for (&t, &count) in r.germination.times.iter().zip(&r.germination.counts) {
            w.serialize(GerminationRow {
                camera: &r.camera,
                replicate: r.replicate,
                t_hours: t,
                count,
            })?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = out_dir.join(VIGOR_CSV);
    let mut w = csv_writer(&path)?;
    for r in &report.replicates {
        for (&t, &a) in r.vigor.times.iter().zip(&r.vigor.leaf_area_mm2) {
            w.serialize(VigorRow {
                camera: &r.camera,
                replicate: r.replicate,
                t_hours: t,
                leaf_area_mm2: a,
            })?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = out_dir.join(EVENTS_CSV);
    let mut w = csv_writer(&path)?;
    for r in &report.replicates {
        for e in &r.events {
            w.serialize(EventRow {
                camera: &r.camera,
                replicate: r.replicate,
                emergence_t_hours: e.emergence_time,
                polygon_wkt: e.polygon.polygon.to_wkt(),
            })?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = out_dir.join(REPORT_JSON);
    std::fs::write(&path, serde_json::to_string_pretty(report)? + "\n").map_err(|e| Error::io(&path, e))
}

pub fn load_report(path: &Path) -> Result<RunReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Replicate curves of one camera sharing a time axis.
struct Group {
    label: String,
    times: Vec<f64>,
    curves: Vec<Vec<f64>>,
}

fn groups(report: &RunReport, pick: impl Fn(&super::run::ReplicateReport) -> (Vec<f64>, Vec<f64>)) -> Vec<Group> {
    let mut by_camera: BTreeMap<&str, Group> = BTreeMap::new();
    for r in &report.replicates {
        let (times, values) = pick(r);
        let g = by_camera.entry(&r.camera).or_insert_with(|| Group {
            label: r.camera.clone(),
            times: times.clone(),
            curves: Vec::new(),
        });
        if g.times == times {
            g.curves.push(values);
        }
    }
    by_camera.into_values().collect()
}

/// Mean and population standard deviation across curves, per time.
pub fn mean_sd(curves: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let n = curves.len() as f64;
    let len = curves.iter().map(Vec::len).min().unwrap_or(0);
    (0..len)
        .map(|i| {
            let mean = curves.iter().map(|c| c[i]).sum::<f64>() / n;
            let var = curves.iter().map(|c| (c[i] - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt())
        })
        .collect()
}

const PALETTE: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

fn line_chart(title: &str, y_label: &str, groups: &[Group]) -> String {
    let (w, h) = (760.0, 440.0);
    let (left, right, top, bottom) = (70.0, 130.0, 40.0, 50.0);
    let t_max = groups
        .iter()
        .flat_map(|g| g.times.iter().copied())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let y_max = groups
        .iter()
        .flat_map(|g| g.curves.iter().flatten().copied())
        .fold(0.0f64, f64::max)
        .max(1.0)
        * 1.05;
    let sx = |t: f64| left + t / t_max * (w - left - right);
    let sy = |v: f64| h - bottom - v / y_max * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{title}</text>"#,
        w / 2.0
    );
    let (x0, x1, y0, y1) = (sx(0.0), sx(t_max), sy(0.0), sy(y_max));
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.1} {y1:.1} V{y0:.1} H{x1:.1}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let t = t_max * k as f64 / 5.0;
        let v = y_max * k as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t:.0}</text>"#,
            sx(t),
            y0 + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.0}</text>"#,
            x0 - 6.0,
            sy(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">hours after sowing</text>"#,
        (x0 + x1) / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(18 {:.1}) rotate(-90)" text-anchor="middle">{y_label}</text>"#,
        (y0 + y1) / 2.0
    );

    for (gi, g) in groups.iter().enumerate() {
        let color = PALETTE[gi % PALETTE.len()];
        let stats = mean_sd(&g.curves);
        if stats.is_empty() {
            continue;
        }
        let upper: Vec<String> = g
            .times
            .iter()
            .zip(&stats)
            .map(|(&t, &(m, sd))| format!("{:.1},{:.1}", sx(t), sy(m + sd)))
            .collect();
        let lower: Vec<String> = g
            .times
            .iter()
            .zip(&stats)
            .rev()
            .map(|(&t, &(m, sd))| format!("{:.1},{:.1}", sx(t), sy((m - sd).max(0.0))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{} {}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#,
            upper.join(" "),
            lower.join(" ")
        );
        for c in &g.curves {
            let pts: Vec<String> = g
                .times
                .iter()
                .zip(c)
                .map(|(&t, &v)| format!("{:.1},{:.1}", sx(t), sy(v)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-opacity="0.35" stroke-width="1"/>"#,
                pts.join(" ")
            );
        }
        let mean: Vec<String> = g
            .times
            .iter()
            .zip(&stats)
            .map(|(&t, &(m, _))| format!("{:.1},{:.1}", sx(t), sy(m)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2.5"/>"#,
            mean.join(" ")
        );
        let ly = top + 10.0 + gi as f64 * 20.0;
        let _ = writeln!(
            s,
            r#"<rect x="{:.1}" y="{:.1}" width="14" height="10" fill="{color}"/>"#,
            w - right + 15.0,
            ly - 9.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}">{} (n={})</text>"#,
            w - right + 35.0,
            g.label,
            g.curves.len()
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Germination and vigor charts: per-replicate lines, camera mean and a
/// +-1 SD band.
pub fn write_plots(report: &RunReport, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let germ = groups(report, |r| {
        (
            r.germination.times.clone(),
            r.germination.counts.iter().map(|&c| c as f64).collect(),
        )
    });
    let vigor = groups(report, |r| (r.vigor.times.clone(), r.vigor.leaf_area_mm2.clone()));
    for (name, svg) in [
        (GERMINATION_SVG, line_chart("Germination", "emerged seedlings", &germ)),
        (VIGOR_SVG, line_chart("Vigor", "leaf area (mm²)", &vigor)),
    ] {
        let path = out_dir.join(name);
        std::fs::write(&path, svg).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_sd_of_constant_and_spread() {
        let s = mean_sd(&[vec![1.0, 2.0], vec![3.0, 2.0]]);
        assert_eq!(s, vec![(2.0, 1.0), (2.0, 0.0)]);
        assert!(mean_sd(&[]).is_empty());
    }
}
