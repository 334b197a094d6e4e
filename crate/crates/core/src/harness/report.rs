//! Report files for a scaling run: `report.csv`, `manifest.txt` and an
//! optional SVG plot.

use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use super::fit::Fit;
use super::scaling::{PairingAxis, ScalingReport};
use crate::error::Result;

/// Writes the report files into `dir`, creating it if needed.
pub fn write_scaling_report(report: &ScalingReport, dir: &Path, plot: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let csv = dir.join("report.csv");
    fs::write(&csv, report.to_csv())?;
    written.push(csv);
    let manifest = dir.join("manifest.txt");
    fs::write(&manifest, report.manifest())?;
    written.push(manifest);
    if plot {
        let svg = dir.join(format!("{}.svg", report.config.family));
        fs::write(&svg, scaling_svg(report))?;
        written.push(svg);
    }
    Ok(written)
}

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 260.0;
const PAD: f64 = 40.0;

struct Panel<'a> {
    title: &'a str,
    ylabel: &'a str,
    points: Vec<(f64, f64)>,
    fit: Fit,
}

fn panel(out: &mut String, x0: f64, p: &Panel<'_>) {
    let xs: Vec<f64> = p.points.iter().map(|q| q.0).collect();
    let ys: Vec<f64> = p.points.iter().map(|q| q.1).collect();
    let line = |x: f64| p.fit.intercept + p.fit.slope * x;
    let (xmin, xmax) = bounds(&xs);
    let fitted = [line(xmin), line(xmax)];
    let (ymin, ymax) = bounds(&ys.iter().chain(&fitted).copied().collect::<Vec<_>>());
    let sx = |x: f64| x0 + PAD + (x - xmin) / (xmax - xmin).max(1e-12) * (PANEL_W - 2.0 * PAD);
    let sy = |y: f64| PANEL_H - PAD - (y - ymin) / (ymax - ymin).max(1e-12) * (PANEL_H - 2.0 * PAD);
    let _ = writeln!(
        out,
        r#"<rect x="{:.1}" y="{PAD}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        x0 + PAD,
        PANEL_W - 2.0 * PAD,
        PANEL_H - 2.0 * PAD
    );
    let _ = writeln!(out, r#"<text x="{:.1}" y="24" font-size="13">{}</text>"#, x0 + PAD, p.title);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11">log m</text>"#,
        x0 + PANEL_W / 2.0 - 15.0,
        PANEL_H - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
        x0 + 14.0,
        PANEL_H / 2.0,
        x0 + 14.0,
        PANEL_H / 2.0,
        p.ylabel
    );
    let _ = writeln!(
        out,
        r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="steelblue" stroke-dasharray="4 3"/>"#,
        sx(xmin),
        sy(fitted[0]),
        sx(xmax),
        sy(fitted[1])
    );
    for &(x, y) in &p.points {
        let _ = writeln!(out, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="crimson"/>"#, sx(x), sy(y));
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="11">slope {:.3}, r2 {:.3}</text>"#,
        x0 + PAD + 6.0,
        PAD + 14.0,
        p.fit.slope,
        p.fit.r_squared
    );
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.05 * (hi - lo).max(1e-9);
    (lo - pad, hi + pad)
}

/// Norm and pairing against `log m` with their fitted lines.
pub fn scaling_svg(report: &ScalingReport) -> String {
    let logm: Vec<f64> = report.rows.iter().map(|r| (r.m as f64).ln()).collect();
    let norm = Panel {
        title: "Besov norm",
        ylabel: "log norm",
        points: logm.iter().zip(&report.rows).map(|(&x, r)| (x, r.norm.abs().ln())).collect(),
        fit: report.norm_fit,
    };
    let (ylabel, ys): (&str, Vec<f64>) = match report.pairing_axis {
        PairingAxis::LogLog => ("log |pairing|", report.rows.iter().map(|r| r.pairing.abs().ln()).collect()),
        PairingAxis::LogLinear => ("|pairing|", report.rows.iter().map(|r| r.pairing.abs()).collect()),
    };
    let pairing = Panel {
        title: "pairing",
        ylabel,
        points: logm.iter().copied().zip(ys).collect(),
        fit: report.pairing_fit,
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{PANEL_H}" font-family="sans-serif">"#,
        2.0 * PANEL_W
    );
    panel(&mut out, 0.0, &norm);
    panel(&mut out, PANEL_W, &pairing);
    out.push_str("</svg>\n");
    out
}
