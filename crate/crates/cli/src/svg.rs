//! Minimal SVG line charts from CSV columns.
//!
//! Output depends only on the input data: fixed canvas, fixed palette, and
//! coordinates printed with two decimals.

use std::fmt::{self, Write as _};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 450.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub enum PlotError {
    Csv(String),
    MissingColumn(String),
    NoData,
}

impl fmt::Display for PlotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlotError::Csv(msg) => write!(f, "bad CSV: {msg}"),
            PlotError::MissingColumn(c) => write!(f, "column `{c}` not found in header"),
            PlotError::NoData => f.write_str("no plottable rows"),
        }
    }
}

impl std::error::Error for PlotError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default)]
pub struct PlotOptions {
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub title: Option<String>,
}

/// One series per y column; rows whose x or y does not parse as a finite
/// number are skipped. An empty body is an error.
pub fn load_series(text: &str, x: &str, ys: &[String]) -> Result<Vec<Series>, PlotError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| PlotError::Csv(e.to_string()))?.clone();
    let index = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| PlotError::MissingColumn(name.to_string()))
    };
    let xi = index(x)?;
    let yis = ys.iter().map(|y| index(y)).collect::<Result<Vec<_>, _>>()?;
    let mut series: Vec<Series> = ys
        .iter()
        .map(|y| Series {
            name: y.clone(),
            points: Vec::new(),
        })
        .collect();
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| PlotError::Csv(e.to_string()))?;
        rows += 1;
        let Some(xv) = record.get(xi).and_then(|s| s.trim().parse::<f64>().ok()) else {
            continue;
        };
        for (s, &yi) in series.iter_mut().zip(&yis) {
            if let Some(yv) = record.get(yi).and_then(|s| s.trim().parse::<f64>().ok()) {
                if xv.is_finite() && yv.is_finite() {
                    s.points.push((xv, yv));
                }
            }
        }
    }
    if rows == 0 {
        return Err(PlotError::NoData);
    }
    Ok(series)
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Option<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return None;
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Some(Self { lo, hi, log })
    }

    /// Position in `[0, 1]`.
    fn unit(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn tick_label(&self, i: usize) -> String {
        let t = self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64;
        let v = if self.log { 10f64.powf(t) } else { t };
        format_number(v)
    }
}

fn format_number(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".to_string() } else { s.to_string() }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the series. Nonpositive values are dropped on log axes.
pub fn render(series: &[Series], opts: &PlotOptions) -> Result<String, PlotError> {
    let keep = |&(x, y): &(f64, f64)| (!opts.log_x || x > 0.0) && (!opts.log_y || y > 0.0);
    let kept: Vec<Series> = series
        .iter()
        .map(|s| Series {
            name: s.name.clone(),
            points: s.points.iter().copied().filter(keep).collect(),
        })
        .collect();
    let all = || kept.iter().flat_map(|s| s.points.iter());
    let xa = Axis::fit(all().map(|p| p.0), opts.log_x).ok_or(PlotError::NoData)?;
    let ya = Axis::fit(all().map(|p| p.1), opts.log_y).ok_or(PlotError::NoData)?;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + xa.unit(x) * plot_w;
    let py = |y: f64| TOP + (1.0 - ya.unit(y)) * plot_h;

    let mut out = String::new();
    let w = &mut out;
    // Writing to a String cannot fail.
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    if let Some(title) = &opts.title {
        let _ = writeln!(w, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(title));
    }
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(w, r#"<g stroke="black" stroke-width="1">"#);
    let _ = writeln!(w, r#"<line x1="{x0:.2}" y1="{y1:.2}" x2="{x1:.2}" y2="{y1:.2}"/>"#);
    let _ = writeln!(w, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/>"#);
    for i in 0..TICKS {
        let f = i as f64 / (TICKS - 1) as f64;
        let tx = x0 + f * plot_w;
        let ty = y1 - f * plot_h;
        let _ = writeln!(w, r#"<line x1="{tx:.2}" y1="{y1:.2}" x2="{tx:.2}" y2="{:.2}"/>"#, y1 + 5.0);
        let _ = writeln!(w, r#"<line x1="{:.2}" y1="{ty:.2}" x2="{x0:.2}" y2="{ty:.2}"/>"#, x0 - 5.0);
    }
    let _ = writeln!(w, "</g>");
    for i in 0..TICKS {
        let f = i as f64 / (TICKS - 1) as f64;
        let tx = x0 + f * plot_w;
        let ty = y1 - f * plot_h;
        let _ = writeln!(w, r#"<text x="{tx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y1 + 20.0, xa.tick_label(i));
        let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, ty + 4.0, ya.tick_label(i));
    }
    let x_label = if opts.log_x { format!("{} (log)", opts.x_label) } else { opts.x_label.clone() };
    let y_label = if opts.log_y { format!("{} (log)", opts.y_label) } else { opts.y_label.clone() };
    let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 15.0, escape(&x_label));
    let _ = writeln!(
        w,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(&y_label)
    );
    for (k, s) in kept.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let color = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(w, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, coords.join(" "));
        for &(x, y) in &s.points {
            let _ = writeln!(w, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(x), py(y));
        }
        let ly = TOP + 14.0 + 16.0 * k as f64;
        let _ = writeln!(w, r#"<text x="{:.2}" y="{ly:.2}" text-anchor="end" fill="{color}">{}</text>"#, x1 - 4.0, escape(&s.name));
    }
    let _ = writeln!(w, "</svg>");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CURVE: &str = "n,q50\n100,0.5\n1000,0.2\n10000,0.05\n";

    #[test]
    fn loads_columns() {
        let s = load_series(CURVE, "n", &["q50".into()]).unwrap();
        assert_eq!(s[0].points, vec![(100.0, 0.5), (1000.0, 0.2), (10000.0, 0.05)]);
        assert_eq!(load_series(CURVE, "n", &["q99".into()]), Err(PlotError::MissingColumn("q99".into())));
        assert_eq!(load_series("n,q50\n", "n", &["q50".into()]), Err(PlotError::NoData));
    }

    #[test]
    fn renders_deterministically() {
        let s = load_series(CURVE, "n", &["q50".into()]).unwrap();
        let opts = PlotOptions {
            x_label: "n".into(),
            y_label: "median".into(),
            log_x: true,
            log_y: true,
            title: Some("a < b".into()),
        };
        let a = render(&s, &opts).unwrap();
        assert_eq!(a, render(&s, &opts).unwrap());
        assert!(a.contains("<polyline"));
        assert!(a.contains("a &lt; b"));
        assert!(a.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn numbers() {
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(100.0), "100");
        assert_eq!(format_number(1e6), "1.00e6");
        assert_eq!(format_number(0.0), "0");
    }
}
