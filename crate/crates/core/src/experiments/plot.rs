use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::summary::SummaryTable;
use super::ALL;
use crate::error::{Error, Result};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];
/// Errors below this are drawn on the floor of the log axis.
const ERROR_FLOOR: f64 = 1e-16;

/// Layout of the two-panel figure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotStyle {
    pub panel_width: u32,
    pub panel_height: u32,
    pub font_size: u32,
    pub stroke_width: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            panel_width: 420,
            panel_height: 320,
            font_size: 12,
            stroke_width: 1.5,
        }
    }
}

struct Series {
    label: String,
    /// `(x, mean_rel_l2, success_rate)`, sorted by `x`.
    points: Vec<(f64, f64, f64)>,
}

fn group_index(group: &str) -> Option<usize> {
    group.strip_prefix('q')?.parse().ok()
}

/// Picks the x variable and the curves to draw.
fn collect_series(table: &SummaryTable) -> (&'static str, Vec<Series>) {
    let experiment = table.rows[0].experiment.as_str();
    let mut series: Vec<Series> = Vec::new();
    let mut push = |label: String, point: (f64, f64, f64)| match series.iter_mut().find(|s| s.label == label) {
        Some(s) => s.points.push(point),
        None => series.push(Series {
            label,
            points: vec![point],
        }),
    };
    let x_label = if experiment == "quintiles" {
        for r in &table.rows {
            if let Some(k) = group_index(&r.group) {
                push(format!("{} s = {}", r.case, r.s), (k as f64, r.mean_rel_l2, r.success_rate));
            }
        }
        "test-value group"
    } else {
        let mut extremes: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for r in &table.rows {
            if let Some(k) = group_index(&r.group) {
                let e = extremes.entry(r.case.as_str()).or_insert((k, k));
                e.0 = e.0.min(k);
                e.1 = e.1.max(k);
            }
        }
        let by_m = experiment == "msweep";
        for r in &table.rows {
            let label = match (group_index(&r.group), extremes.get(r.case.as_str())) {
                (Some(k), Some(&(lo, _))) if k == lo => format!("{} {} (lowest T)", r.case, r.group),
                (Some(k), Some(&(_, hi))) if k == hi => format!("{} {} (highest T)", r.case, r.group),
                (Some(_), _) => continue,
                (None, _) if r.group == ALL => r.case.clone(),
                (None, _) => format!("{} {}", r.case, r.group),
            };
            let x = if by_m { r.m } else { r.s } as f64;
            push(label, (x, r.mean_rel_l2, r.success_rate));
        }
        if by_m {
            "m"
        } else {
            "s"
        }
    };
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    (x_label, series)
}

struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn map(&self, v: f64, a: f64, b: f64) -> f64 {
        if self.hi > self.lo {
            a + (v - self.lo) / (self.hi - self.lo) * (b - a)
        } else {
            (a + b) / 2.0
        }
    }
}

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|k| k * mag)
        .find(|st| *st >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_num(v: f64) -> String {
    if v == v.round() {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

struct Panel<'a> {
    left: f64,
    title: &'a str,
    x_label: &'a str,
    x: &'a Axis,
    y: Axis,
    y_ticks: Vec<(f64, String)>,
    x_ticks: &'a [f64],
}

impl Panel<'_> {
    fn draw(&self, out: &mut String, style: &PlotStyle, series: &[Series], value: impl Fn(&(f64, f64, f64)) -> f64) {
        let (w, h) = (style.panel_width as f64, style.panel_height as f64);
        let fs = style.font_size as f64;
        let (x0, x1) = (self.left + 60.0, self.left + w - 15.0);
        let (y0, y1) = (h - 45.0, 30.0);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="{}" font-weight="bold">{}</text>"#,
            (x0 + x1) / 2.0,
            fs + 1.0,
            self.title
        );
        let _ = writeln!(
            out,
            r##"<rect x="{x0:.1}" y="{y1:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
            x1 - x0,
            y0 - y1
        );
        for &t in self.x_ticks {
            let px = self.x.map(t, x0, x1);
            let _ = writeln!(
                out,
                r##"<line x1="{px:.1}" y1="{y0:.1}" x2="{px:.1}" y2="{:.1}" stroke="#444"/><text x="{px:.1}" y="{:.1}" text-anchor="middle" font-size="{fs}">{}</text>"##,
                y0 + 4.0,
                y0 + 4.0 + fs,
                fmt_num(t)
            );
        }
        for (t, label) in &self.y_ticks {
            let py = self.y.map(*t, y0, y1);
            let _ = writeln!(
                out,
                r##"<line x1="{:.1}" y1="{py:.1}" x2="{x0:.1}" y2="{py:.1}" stroke="#444"/><line x1="{x0:.1}" y1="{py:.1}" x2="{x1:.1}" y2="{py:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-size="{fs}">{label}</text>"##,
                x0 - 4.0,
                x0 - 6.0,
                py + fs / 3.0
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="{fs}">{}</text>"#,
            (x0 + x1) / 2.0,
            h - 12.0,
            self.x_label
        );
        for (i, s) in series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|p| format!("{:.2},{:.2}", self.x.map(p.0, x0, x1), self.y.map(value(p), y0, y1)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{}"/>"#,
                pts.join(" "),
                style.stroke_width
            );
            for p in &pts {
                let (px, py) = p.split_once(',').unwrap_or(("0", "0"));
                let _ = writeln!(out, r#"<circle cx="{px}" cy="{py}" r="2.5" fill="{color}"/>"#);
            }
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders mean relative l2 error (log scale) and success rate side by side,
/// one curve per series, with a shared legend. Returns `false` and writes
/// nothing for an empty table.
pub fn emit_svg(table: &SummaryTable, path: &Path, style: &PlotStyle) -> Result<bool> {
    if table.is_empty() {
        return Ok(false);
    }
    let (x_label, series) = collect_series(table);
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (xmin, xmax) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let x = Axis { lo: xmin, hi: xmax };
    let x_ticks = nice_ticks(xmin, xmax);

    let log_err = |p: &(f64, f64, f64)| p.1.max(ERROR_FLOOR).log10();
    let errs = series.iter().flat_map(|s| s.points.iter().map(log_err));
    let (emin, emax) = errs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| (a.min(e), b.max(e)));
    let (elo, ehi) = (emin.floor(), emax.ceil().max(emin.floor() + 1.0));
    let decade_step = ((ehi - elo) / 6.0).ceil().max(1.0);
    let mut err_ticks = Vec::new();
    let mut t = elo;
    while t <= ehi {
        err_ticks.push((t, format!("1e{t:.0}")));
        t += decade_step;
    }
    let rate_ticks = (0..=5).map(|k| (k as f64 / 5.0, format!("{:.1}", k as f64 / 5.0))).collect();

    let (w, h) = (style.panel_width as f64, style.panel_height as f64);
    let legend_rows = series.len().div_ceil(2);
    let line_h = style.font_size as f64 + 6.0;
    let total_h = h + 10.0 + legend_rows as f64 * line_h;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{total_h:.0}" viewBox="0 0 {:.0} {total_h:.0}" font-family="sans-serif">"#,
        2.0 * w,
        2.0 * w
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let title = format!("{} mean relative l2 error", escape(&table.rows[0].experiment));
    Panel {
        left: 0.0,
        title: &title,
        x_label,
        x: &x,
        y: Axis { lo: elo, hi: ehi },
        y_ticks: err_ticks,
        x_ticks: &x_ticks,
    }
    .draw(&mut out, style, &series, log_err);
    let title = format!("{} success rate", escape(&table.rows[0].experiment));
    Panel {
        left: w,
        title: &title,
        x_label,
        x: &x,
        y: Axis { lo: 0.0, hi: 1.0 },
        y_ticks: rate_ticks,
        x_ticks: &x_ticks,
    }
    .draw(&mut out, style, &series, |p| p.2);
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let lx = 60.0 + (i % 2) as f64 * w;
        let ly = h + 10.0 + (i / 2) as f64 * line_h;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/><text x="{:.1}" y="{:.1}" font-size="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + style.font_size as f64 / 3.0,
            style.font_size,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    std::fs::write(path, out).map_err(|e| Error::io(path, e))?;
    Ok(true)
}
