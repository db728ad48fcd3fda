//! Deterministic SVG error-bar charts.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSeries {
    pub label: String,
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CiChartSpec {
    pub title: String,
    pub series: Vec<ChartSeries>,
    pub reference_line: Option<f64>,
    pub x_label: String,
    pub y_label: String,
    /// Multiplier applied to every value before plotting (100 for proportions).
    pub scale: f64,
}

pub const WIDTH: f64 = 640.0;
pub const HEIGHT: f64 = 400.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 610.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 330.0;
const TICKS: usize = 5;
const CAP: f64 = 8.0;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Coordinates are written with two decimals; `-0.00` is normalized.
fn c(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Maps data values to SVG y coordinates.
#[derive(Debug, Clone, Copy)]
struct YScale {
    lo: f64,
    hi: f64,
    step: f64,
}

impl YScale {
    fn y(&self, v: f64) -> f64 {
        BOTTOM - (v - self.lo) / (self.hi - self.lo) * (BOTTOM - TOP)
    }
}

fn y_scale(spec: &CiChartSpec) -> YScale {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in &spec.series {
        for v in [s.point, s.ci_low, s.ci_high] {
            lo = lo.min(v * spec.scale);
            hi = hi.max(v * spec.scale);
        }
    }
    if let Some(r) = spec.reference_line {
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let span = hi - lo;
    let pad = if span > 0.0 {
        0.1 * span
    } else {
        lo.abs().max(1.0) * 0.1
    };
    let step = nice_step((span + 2.0 * pad) / TICKS as f64);
    YScale {
        lo: ((lo - pad) / step).floor() * step,
        hi: ((hi + pad) / step).ceil() * step,
        step,
    }
}

fn tick_label(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|ch| ch == '0' || ch == '.') => rest.to_string(),
        _ => s,
    }
}

/// Smallest 1, 2 or 5 times a power of ten that is at least `raw`.
fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw * (1.0 - 1e-12))
        .unwrap_or(10.0 * mag)
}

/// Renders the chart. Identical specs give byte-identical documents.
pub fn render_ci_chart(spec: &CiChartSpec) -> Result<String> {
    if spec.series.is_empty() {
        return Err(Error::Parameter("chart has no series".into()));
    }
    if !(spec.scale.is_finite() && spec.scale > 0.0) {
        return Err(Error::Parameter(format!(
            "chart scale {} must be positive",
            spec.scale
        )));
    }
    for s in &spec.series {
        let vals = [s.point, s.ci_low, s.ci_high];
        if vals.iter().any(|v| !v.is_finite()) || s.ci_low > s.ci_high {
            return Err(Error::Parameter(format!(
                "series {:?} has an invalid interval",
                s.label
            )));
        }
    }
    if spec.reference_line.is_some_and(|r| !r.is_finite()) {
        return Err(Error::Parameter("reference line must be finite".into()));
    }
    let ys = y_scale(spec);
    let mut out = String::new();
    // writes to a String cannot fail
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(
        out,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text class="title" x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        c(WIDTH / 2.0),
        escape(&spec.title)
    );

    // axes
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{l}" y1="{t}" x2="{l}" y2="{b}" stroke="black"/>"#,
        l = c(LEFT),
        t = c(TOP),
        b = c(BOTTOM)
    );
    let _ = writeln!(
        out,
        r#"<line class="axis" x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#,
        l = c(LEFT),
        r = c(RIGHT),
        b = c(BOTTOM)
    );
    let ticks = ((ys.hi - ys.lo) / ys.step).round() as usize;
    let decimals = (-ys.step.log10().floor()).max(0.0) as usize;
    for k in 0..=ticks {
        let v = ys.lo + ys.step * k as f64;
        let y = ys.y(v);
        let _ = writeln!(
            out,
            r#"<line class="tick" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black"/><text x="{}" y="{}" text-anchor="end">{}</text>"#,
            c(LEFT - 5.0),
            c(LEFT),
            c(LEFT - 8.0),
            c(y + 4.0),
            tick_label(v, decimals),
            y = c(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle">{}</text>"#,
        c((LEFT + RIGHT) / 2.0),
        c(HEIGHT - 12.0),
        escape(&spec.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="20" y="{y}" text-anchor="middle" transform="rotate(-90 20 {y})">{}</text>"#,
        escape(&spec.y_label),
        y = c((TOP + BOTTOM) / 2.0)
    );

    if let Some(r) = spec.reference_line {
        let y = c(ys.y(r));
        let _ = writeln!(
            out,
            r#"<line class="reference" data-value="{r}" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="gray" stroke-dasharray="6 4"/>"#,
            c(LEFT),
            c(RIGHT)
        );
    }

    let slot = (RIGHT - LEFT) / spec.series.len() as f64;
    for (i, s) in spec.series.iter().enumerate() {
        let x = LEFT + slot * (i as f64 + 0.5);
        let (p, lo, hi) = (
            s.point * spec.scale,
            s.ci_low * spec.scale,
            s.ci_high * spec.scale,
        );
        let label = escape(&s.label);
        let _ = writeln!(
            out,
            r#"<g class="series" data-label="{label}" data-point="{p}" data-ci-low="{lo}" data-ci-high="{hi}">"#
        );
        let _ = writeln!(
            out,
            r#"<line class="error-bar" x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/>"#,
            c(ys.y(lo)),
            c(ys.y(hi)),
            x = c(x)
        );
        for v in [lo, hi] {
            let _ = writeln!(
                out,
                r#"<line class="cap" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black"/>"#,
                c(x - CAP),
                c(x + CAP),
                y = c(ys.y(v))
            );
        }
        let _ = writeln!(
            out,
            r#"<circle class="marker" cx="{}" cy="{}" r="4" fill="black"/>"#,
            c(x),
            c(ys.y(p))
        );
        let _ = writeln!(
            out,
            r#"<text class="series-label" x="{}" y="{}" text-anchor="middle">{label}</text>"#,
            c(x),
            c(BOTTOM + 18.0)
        );
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// True when a reference value lies within the series' (scaled) interval,
/// i.e. the reference line crosses its error bar.
pub fn reference_crosses(spec: &CiChartSpec, series: &ChartSeries) -> bool {
    spec.reference_line
        .is_some_and(|r| series.ci_low * spec.scale <= r && r <= series.ci_high * spec.scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(series: Vec<ChartSeries>) -> CiChartSpec {
        CiChartSpec {
            title: "Mean <percentile>".into(),
            series,
            reference_line: Some(50.0),
            x_label: "Institution".into(),
            y_label: "Mean".into(),
            scale: 1.0,
        }
    }

    fn s(label: &str, p: f64, lo: f64, hi: f64) -> ChartSeries {
        ChartSeries {
            label: label.into(),
            point: p,
            ci_low: lo,
            ci_high: hi,
        }
    }

    #[test]
    fn empty_series_is_an_error() {
        assert!(matches!(
            render_ci_chart(&spec(vec![])),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn deterministic_and_escaped() {
        let sp = spec(vec![s("A&B", 49.67, 45.99, 53.36)]);
        let a = render_ci_chart(&sp).unwrap();
        assert_eq!(a, render_ci_chart(&sp).unwrap());
        assert!(a.contains("A&amp;B"));
        assert!(a.contains("&lt;percentile&gt;"));
        assert!(a.contains(r#"viewBox="0 0 640 400""#));
        assert!(a.contains(r#"stroke-dasharray="6 4""#));
    }

    #[test]
    fn zero_width_interval_renders() {
        let mut sp = spec(vec![s("A", 3.0, 3.0, 3.0)]);
        sp.reference_line = None;
        let svg = render_ci_chart(&sp).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(!svg.contains("reference"));
    }

    #[test]
    fn inverted_interval_rejected() {
        assert!(render_ci_chart(&spec(vec![s("A", 1.0, 2.0, 0.0)])).is_err());
    }

    #[test]
    fn tick_labels() {
        assert_eq!(tick_label(-1e-15, 0), "0");
        assert_eq!(tick_label(-0.5, 1), "-0.5");
        assert_eq!(tick_label(20.0, 0), "20");
    }

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(5.6), 10.0);
        assert_eq!(nice_step(1.3), 2.0);
        assert_eq!(nice_step(0.04), 0.05);
        assert_eq!(nice_step(3.0), 5.0);
    }

    #[test]
    fn crossing() {
        let sp = spec(vec![
            s("1", 49.67, 45.99, 53.36),
            s("2", 32.15, 29.85, 34.46),
        ]);
        assert!(reference_crosses(&sp, &sp.series[0]));
        assert!(!reference_crosses(&sp, &sp.series[1]));
    }
}
