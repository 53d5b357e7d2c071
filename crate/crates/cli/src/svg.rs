//! Minimal SVG 1.1 line plots: stacked panels sharing the x axis, each with
//! axes, ticks, a y label and a legend.

use std::fmt::Write as _;

const WIDTH: f64 = 820.0;
const PANEL_HEIGHT: f64 = 250.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const GAP: f64 = 50.0;
const BOTTOM: f64 = 50.0;
const MAX_POINTS: usize = 4000;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// `x` with 9 significant digits, no exponent.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32 + 1;
    let decimals = (9 - magnitude).clamp(0, 17) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, xs: &[f64], ys: &[f64]) -> Self {
        Self {
            label: label.into(),
            points: xs.iter().copied().zip(ys.iter().copied()).collect(),
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub y_label: String,
    pub series: Vec<Series>,
    /// Fixed y range; points outside are clamped.
    pub y_range: Option<(f64, f64)>,
}

impl Panel {
    pub fn new(y_label: impl Into<String>) -> Self {
        Self {
            y_label: y_label.into(),
            series: Vec::new(),
            y_range: None,
        }
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    pub fn range(mut self, lo: f64, hi: f64) -> Self {
        self.y_range = Some((lo, hi));
        self
    }
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub panels: Vec<Panel>,
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let p = 10f64.powf(raw.log10().floor());
    let f = raw / p;
    let m = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    m * p
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        let c = if lo.is_finite() { lo } else { 0.0 };
        return (c - 1.0, c + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn thin(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.len() <= MAX_POINTS {
        return points.to_vec();
    }
    // keep the extremes of each bucket so oscillations survive
    let bucket = points.len().div_ceil(MAX_POINTS / 2);
    let mut out = Vec::with_capacity(MAX_POINTS + 2);
    for chunk in points.chunks(bucket) {
        let lo = chunk.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        let hi = chunk.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        if lo.0 <= hi.0 {
            out.push(*lo);
            out.push(*hi);
        } else {
            out.push(*hi);
            out.push(*lo);
        }
    }
    out.dedup();
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render(plot: &Plot) -> String {
    let n = plot.panels.len().max(1) as f64;
    let height = TOP + n * PANEL_HEIGHT + (n - 1.0) * GAP + BOTTOM;
    let plot_w = WIDTH - LEFT - RIGHT;
    let all_x = plot
        .panels
        .iter()
        .flat_map(|p| p.series.iter())
        .flat_map(|s| s.points.iter().map(|q| q.0));
    let (x_lo, x_hi) = all_x.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (x_lo, x_hi) = if x_hi > x_lo { (x_lo, x_hi) } else { padded(x_lo, x_hi) };
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        sig9(WIDTH),
        sig9(height),
        sig9(WIDTH),
        sig9(height)
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        sig9(LEFT + plot_w / 2.0),
        escape(&plot.title)
    );

    for (pi, panel) in plot.panels.iter().enumerate() {
        let top = TOP + pi as f64 * (PANEL_HEIGHT + GAP);
        let bottom = top + PANEL_HEIGHT;
        let (y_lo, y_hi) = panel.y_range.unwrap_or_else(|| {
            let (a, b) = panel
                .series
                .iter()
                .flat_map(|s| s.points.iter().map(|q| q.1))
                .filter(|y| y.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
            padded(a, b)
        });
        let sy = |y: f64| bottom - (y.clamp(y_lo, y_hi) - y_lo) / (y_hi - y_lo) * PANEL_HEIGHT;

        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            sig9(LEFT),
            sig9(top),
            sig9(plot_w),
            sig9(PANEL_HEIGHT)
        );
        for t in ticks(y_lo, y_hi) {
            let y = sy(t);
            let _ = writeln!(
                svg,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#dddddd"/><text x="{}" y="{}" text-anchor="end">{}</text>"##,
                sig9(LEFT),
                sig9(y),
                sig9(LEFT + plot_w),
                sig9(y),
                sig9(LEFT - 6.0),
                sig9(y + 4.0),
                sig9(t)
            );
        }
        if y_lo < 0.0 && y_hi > 0.0 {
            let _ = writeln!(
                svg,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888888"/>"##,
                sig9(LEFT),
                sig9(sy(0.0)),
                sig9(LEFT + plot_w),
                sig9(sy(0.0))
            );
        }
        for t in ticks(x_lo, x_hi) {
            let x = sx(t);
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/><text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                sig9(x),
                sig9(bottom),
                sig9(x),
                sig9(bottom + 5.0),
                sig9(x),
                sig9(bottom + 18.0),
                sig9(t)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
            sig9(top + PANEL_HEIGHT / 2.0),
            sig9(top + PANEL_HEIGHT / 2.0),
            escape(&panel.y_label)
        );

        for (si, s) in panel.series.iter().enumerate() {
            let color = COLORS[si % COLORS.len()];
            let pts: Vec<String> = thin(&s.points)
                .iter()
                .filter(|q| q.1.is_finite())
                .map(|&(x, y)| format!("{},{}", sig9(sx(x)), sig9(sy(y))))
                .collect();
            let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.2"{dash} points="{}"/>"#,
                pts.join(" ")
            );
            let ly = top + 16.0 + 18.0 * si as f64;
            let lx = LEFT + plot_w + 12.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
                sig9(lx),
                sig9(ly),
                sig9(lx + 24.0),
                sig9(ly),
                sig9(lx + 30.0),
                sig9(ly + 4.0),
                escape(&s.label)
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        sig9(LEFT + plot_w / 2.0),
        sig9(height - 12.0),
        escape(&plot.x_label)
    );
    svg.push_str("</svg>\n");
    svg
}
