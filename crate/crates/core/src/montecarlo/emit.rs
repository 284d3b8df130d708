//! Result files: the summary CSV and per-cell SVG histograms.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::io::fmt_real;
use crate::linalg::normal_pdf;
use crate::montecarlo::McSummary;

pub const SUMMARY_HEADER: [&str; 6] = [
    "label",
    "coverage_mean",
    "coverage_std",
    "ks_biased",
    "ks_debiased",
    "reps",
];

/// Histogram layout: bins over `[−HIST_RANGE, HIST_RANGE]` in units of the
/// standardizing deviation.
pub const HIST_BINS: usize = 30;
pub const HIST_RANGE: f64 = 4.0;
const SVG_WIDTH: f64 = 480.0;
const SVG_HEIGHT: f64 = 320.0;
const SVG_MARGIN: f64 = 30.0;
const DENSITY_POINTS: usize = 121;

/// One parsed row of a summary CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    pub coverage_mean: f64,
    pub coverage_std: f64,
    pub ks_biased: f64,
    pub ks_debiased: f64,
    pub reps: usize,
}

impl SummaryRow {
    pub fn from_summary(label: &str, s: &McSummary) -> Self {
        Self {
            label: label.to_string(),
            coverage_mean: s.coverage_mean,
            coverage_std: s.coverage_std,
            ks_biased: s.ks_biased,
            ks_debiased: s.ks_debiased,
            reps: s.reps,
        }
    }
}

/// Renders the summary CSV; reals carry 17 significant digits.
pub fn summary_csv(cells: &[(String, McSummary)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_HEADER)?;
    for (label, s) in cells {
        w.write_record([
            label.clone(),
            fmt_real(s.coverage_mean),
            fmt_real(s.coverage_std),
            fmt_real(s.ks_biased),
            fmt_real(s.ks_debiased),
            s.reps.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Writes the summary CSV to `path`.
pub fn emit_summary(cells: &[(String, McSummary)], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, summary_csv(cells)?)?;
    Ok(())
}

/// Parses a summary CSV produced by [`summary_csv`].
pub fn parse_summary_csv(text: &str) -> Result<Vec<SummaryRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    if header.iter().ne(SUMMARY_HEADER.iter().copied()) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let real = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(SummaryRow {
            label: rec[0].to_string(),
            coverage_mean: real(&rec[1])?,
            coverage_std: real(&rec[2])?,
            ks_biased: real(&rec[3])?,
            ks_debiased: real(&rec[4])?,
            reps: rec[5]
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("{:?}: {e}", &rec[5])))?,
        });
    }
    Ok(rows)
}

/// Bin counts over `[−HIST_RANGE, HIST_RANGE]`; values outside are dropped.
pub fn histogram_counts(samples: &[f64]) -> Vec<usize> {
    let width = 2.0 * HIST_RANGE / HIST_BINS as f64;
    let mut counts = vec![0usize; HIST_BINS];
    for &x in samples {
        if (-HIST_RANGE..=HIST_RANGE).contains(&x) {
            let bin = (((x + HIST_RANGE) / width) as usize).min(HIST_BINS - 1);
            counts[bin] += 1;
        }
    }
    counts
}

/// Density-scaled histogram of standardized statistics with the standard
/// normal density overlaid, as a standalone SVG 1.1 document.
pub fn histogram_svg(samples: &[f64], title: &str) -> String {
    let counts = histogram_counts(samples);
    let width = 2.0 * HIST_RANGE / HIST_BINS as f64;
    let total = samples.len().max(1) as f64;
    let densities: Vec<f64> = counts.iter().map(|&c| c as f64 / (total * width)).collect();
    let peak = densities.iter().copied().fold(normal_pdf(0.0), f64::max) * 1.1;
    let plot_w = SVG_WIDTH - 2.0 * SVG_MARGIN;
    let plot_h = SVG_HEIGHT - 2.0 * SVG_MARGIN;
    let sx = |x: f64| SVG_MARGIN + (x + HIST_RANGE) / (2.0 * HIST_RANGE) * plot_w;
    let sy = |d: f64| SVG_HEIGHT - SVG_MARGIN - d / peak * plot_h;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(
        out,
        "<desc>{HIST_BINS} bins over [-{HIST_RANGE}, {HIST_RANGE}], n = {}, density scale</desc>",
        samples.len()
    );
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000"/>"##,
        SVG_MARGIN,
        sy(0.0),
        SVG_WIDTH - SVG_MARGIN,
        sy(0.0)
    );
    for (b, &d) in densities.iter().enumerate() {
        let x0 = -HIST_RANGE + b as f64 * width;
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="#3182bd"/>"##,
            sx(x0),
            sy(d),
            sx(x0 + width) - sx(x0),
            sy(0.0) - sy(d)
        );
    }
    let points: Vec<String> = (0..DENSITY_POINTS)
        .map(|i| {
            let x = -HIST_RANGE + 2.0 * HIST_RANGE * i as f64 / (DENSITY_POINTS - 1) as f64;
            format!("{:.2},{:.2}", sx(x), sy(normal_pdf(x)))
        })
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#de2d26" stroke-width="2"/>"##,
        points.join(" ")
    );
    out.push_str("</svg>\n");
    out
}

/// Writes `<stem>_biased.svg` and `<stem>_debiased.svg` for one cell.
pub fn emit_histograms(
    summary: &McSummary,
    label: &str,
    dir: impl AsRef<Path>,
    stem: &str,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join(format!("{stem}_biased.svg")),
        histogram_svg(&summary.stats_biased, &format!("{label} (biased)")),
    )?;
    fs::write(
        dir.join(format!("{stem}_debiased.svg")),
        histogram_svg(&summary.stats_debiased, &format!("{label} (debiased)")),
    )?;
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
