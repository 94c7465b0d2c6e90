//! CSV and SVG output for experiment runs.
//!
//! Both writers are pure functions of the sorted records, so identical runs
//! give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CrcError, Result};
use crate::experiment::{sort_records, summarize, RunRecord, Summary};

pub const CSV_HEADER: &str = "run,scheme,n,k,risk,inefficiency,infeasible";

pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &sorted {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.run_index, r.scheme, r.n, r.k, r.risk, r.inefficiency, r.infeasible_count
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Risk,
    Inefficiency,
}

impl Metric {
    fn label(self) -> &'static str {
        match self {
            Metric::Risk => "empirical risk",
            Metric::Inefficiency => "inefficiency",
        }
    }

    fn of(self, s: &Summary) -> (f64, f64) {
        match self {
            Metric::Risk => (s.mean_risk, s.se_risk),
            Metric::Inefficiency => (s.mean_inefficiency, s.se_inefficiency),
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

struct Series {
    label: String,
    points: Vec<(f64, f64, f64)>,
}

fn series(records: &[RunRecord], metric: Metric) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for s in summarize(records) {
        let label = if s.k == 0 { s.scheme.to_string() } else { format!("{} K={}", s.scheme, s.k) };
        let (mean, se) = metric.of(&s);
        if !mean.is_finite() {
            continue;
        }
        let point = (s.n as f64, mean, if se.is_finite() { se } else { 0.0 });
        match out.iter_mut().find(|x| x.label == label) {
            Some(x) => x.points.push(point),
            None => out.push(Series { label, points: vec![point] }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Mean ± SE against `N`, one series per scheme and fold count.
/// `reference` draws a dashed horizontal line (the risk target).
pub fn records_to_svg(records: &[RunRecord], metric: Metric, title: &str, reference: Option<f64>) -> String {
    let series = series(records, metric);
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = range(
        series
            .iter()
            .flat_map(|s| s.points.iter().flat_map(|p| [p.1 - p.2, p.1 + p.2]))
            .chain(reference),
    );
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title))
        .unwrap();
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    writeln!(
        out,
        r#"<polyline points="{left},{top} {left},{bottom} {right},{bottom}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (x, y) = (px(xv), py(yv));
        writeln!(out, r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, bottom + 5.0).unwrap();
        writeln!(out, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{xv:.1}</text>"#, bottom + 18.0).unwrap();
        writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/>"#, left - 5.0).unwrap();
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.4}</text>"#, left - 8.0, y + 4.0).unwrap();
    }
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">N</text>"#, WIDTH / 2.0, HEIGHT - 15.0).unwrap();
    writeln!(
        out,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        metric.label()
    )
    .unwrap();
    if let Some(r) = reference {
        let y = py(r);
        writeln!(
            out,
            r#"<line x1="{left}" y1="{y:.2}" x2="{right}" y2="{y:.2}" stroke="gray" stroke-dasharray="6,4"/>"#
        )
        .unwrap();
    }
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let upper = s.points.iter().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1 + p.2)));
        let lower = s.points.iter().rev().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1 - p.2)));
        let band: Vec<String> = upper.chain(lower).collect();
        writeln!(out, r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, band.join(" ")).unwrap();
        let line: Vec<String> = s.points.iter().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1))).collect();
        writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, line.join(" ")).unwrap();
        for p in &s.points {
            writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(p.0), py(p.1)).unwrap();
        }
        let ly = top + 15.0 * i as f64;
        writeln!(
            out,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            right - 110.0,
            right - 90.0
        )
        .unwrap();
        writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, right - 85.0, ly + 4.0, escape(&s.label)).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|e| CrcError::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Writes `<stem>.csv`, `<stem>_risk.svg` and `<stem>_ineff.svg` into `dir`.
pub fn write_report(dir: &Path, stem: &str, records: &[RunRecord], alpha: f64) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CrcError::Io { path: dir.display().to_string(), message: e.to_string() })?;
    write_file(&dir.join(format!("{stem}.csv")), &records_to_csv(records))?;
    write_file(
        &dir.join(format!("{stem}_risk.svg")),
        &records_to_svg(records, Metric::Risk, &format!("{stem}: empirical risk"), Some(alpha)),
    )?;
    write_file(
        &dir.join(format!("{stem}_ineff.svg")),
        &records_to_svg(records, Metric::Inefficiency, &format!("{stem}: inefficiency"), None),
    )
}
