//! Minimal SVG renderer for aggregate curves: one line per series with a
//! +/- one-std band, axes, tick labels and a legend.

use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::AggregateCurve;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 48.0;
const MARGIN_B: f64 = 56.0;
const MAX_POINTS: usize = 400;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Which quantity to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    CumPayoff,
    CumRegret,
}

impl PlotMetric {
    fn label(&self) -> &'static str {
        match self {
            PlotMetric::CumPayoff => "cumulative payoff",
            PlotMetric::CumRegret => "cumulative regret",
        }
    }

    fn series<'a>(&self, c: &'a AggregateCurve) -> (&'a [f64], &'a [f64]) {
        match self {
            PlotMetric::CumPayoff => (&c.mean_cum_payoff, &c.std_cum_payoff),
            PlotMetric::CumRegret => (&c.mean_cum_regret, &c.std_cum_regret),
        }
    }
}

/// Render the curves into an SVG file.
pub fn emit_plot(
    path: &Path,
    title: &str,
    metric: PlotMetric,
    curves: &[AggregateCurve],
) -> Result<()> {
    if curves.is_empty() {
        return Err(Error::invalid_input("nothing to plot"));
    }
    let t_max = curves.iter().map(|c| c.rounds()).max().unwrap() as f64;
    if t_max == 0.0 {
        return Err(Error::invalid_input("curves are empty"));
    }
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for c in curves {
        let (mean, std) = metric.series(c);
        for (m, s) in mean.iter().zip(std) {
            y_min = y_min.min(m - s);
            y_max = y_max.max(m + s);
        }
    }
    if !(y_min.is_finite() && y_max.is_finite()) {
        return Err(Error::invalid_input("non-finite values in plot data"));
    }
    if y_max == y_min {
        y_max = y_min + 1.0;
    }
    let pad = 0.04 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = move |t: f64| MARGIN_L + (t / t_max) * pw;
    let sy = move |y: f64| MARGIN_T + (1.0 - (y - y_min) / (y_max - y_min)) * ph;

    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )?;
    writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#)?;
    writeln!(
        w,
        r#"<text x="{}" y="28" font-family="sans-serif" font-size="18" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        xml_escape(title)
    )?;

    // axes
    writeln!(
        w,
        r#"<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{}" stroke="black"/>"#,
        HEIGHT - MARGIN_B
    )?;
    writeln!(
        w,
        r#"<line x1="{MARGIN_L}" y1="{}" x2="{}" y2="{0}" stroke="black"/>"#,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R
    )?;
    for i in 0..=5 {
        let frac = i as f64 / 5.0;
        let t = frac * t_max;
        let x = sx(t);
        writeln!(
            w,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/>"#,
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        )?;
        writeln!(
            w,
            r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            HEIGHT - MARGIN_B + 20.0,
            t.round() as u64
        )?;
        let y = y_min + frac * (y_max - y_min);
        let yy = sy(y);
        writeln!(
            w,
            r#"<line x1="{}" y1="{yy}" x2="{MARGIN_L}" y2="{yy}" stroke="black"/>"#,
            MARGIN_L - 5.0
        )?;
        writeln!(
            w,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">{y:.1}</text>"#,
            MARGIN_L - 9.0,
            yy + 4.0
        )?;
    }
    writeln!(
        w,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">round t</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 12.0
    )?;
    writeln!(
        w,
        r#"<text x="20" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {0})">{}</text>"#,
        MARGIN_T + ph / 2.0,
        metric.label()
    )?;

    for (ci, c) in curves.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let (mean, std) = metric.series(c);
        let n = mean.len();
        let stride = n.div_ceil(MAX_POINTS).max(1);
        let idxs: Vec<usize> = (0..n).step_by(stride).chain(std::iter::once(n - 1)).collect();

        // band polygon: upper edge left-to-right, lower edge back
        let mut band = String::new();
        for &t in &idxs {
            band.push_str(&format!("{:.2},{:.2} ", sx((t + 1) as f64), sy(mean[t] + std[t])));
        }
        for &t in idxs.iter().rev() {
            band.push_str(&format!("{:.2},{:.2} ", sx((t + 1) as f64), sy(mean[t] - std[t])));
        }
        writeln!(
            w,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
            band.trim_end()
        )?;

        let mut line = String::new();
        for &t in &idxs {
            line.push_str(&format!("{:.2},{:.2} ", sx((t + 1) as f64), sy(mean[t])));
        }
        writeln!(
            w,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            line.trim_end()
        )?;

        // legend entry
        let ly = MARGIN_T + 16.0 + 22.0 * ci as f64;
        let lx = WIDTH - MARGIN_R + 12.0;
        writeln!(
            w,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/>"#,
            lx + 26.0
        )?;
        writeln!(
            w,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13">{}</text>"#,
            lx + 32.0,
            ly + 4.0,
            xml_escape(&format!("{} ({} reps)", c.algo, c.reps))
        )?;
    }
    writeln!(w, "</svg>")?;
    w.flush()?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
