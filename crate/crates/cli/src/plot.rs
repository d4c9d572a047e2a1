//! Log-log SVG rendering of a rate table CSV.

use std::fmt::Write as _;
use std::path::Path;

use contrast_asym::asymptotics::fit_rate;

use crate::error::CliError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 48.0;
const BOTTOM: f64 = 64.0;

/// Rows `(n, ||d_n||_L1, value)` of a rate table, its quantity name and the predicted exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct RateCsv {
    pub quantity: String,
    pub rows: Vec<(usize, f64, f64)>,
    pub paper_exponent: Option<f64>,
}

pub fn parse_rate_csv(path: &Path, text: &str) -> Result<RateCsv, CliError> {
    let err = |line: usize, msg: &str| CliError::Csv { path: path.to_path_buf(), line, msg: msg.to_string() };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "n,l1_dn,quantity,value" => {}
        _ => return Err(err(1, "expected header `n,l1_dn,quantity,value`")),
    }
    let mut quantity = String::new();
    let mut rows = Vec::new();
    let mut paper_exponent = None;
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            for kv in meta.split_whitespace() {
                if let Some(v) = kv.strip_prefix("paper_exponent=") {
                    paper_exponent = Some(v.parse().map_err(|_| err(i + 1, "bad paper_exponent"))?);
                }
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(err(i + 1, "expected 4 fields"));
        }
        let n = f[0].parse().map_err(|_| err(i + 1, "bad n"))?;
        let x: f64 = f[1].parse().map_err(|_| err(i + 1, "bad l1_dn"))?;
        let y: f64 = f[3].parse().map_err(|_| err(i + 1, "bad value"))?;
        quantity = f[2].to_string();
        rows.push((n, x, y));
    }
    if rows.len() < 2 {
        return Err(err(0, "need at least two rows"));
    }
    if rows.iter().any(|r| !(r.1 > 0.0) || !(r.2 > 0.0)) {
        return Err(err(0, "log-log plot needs positive l1_dn and value"));
    }
    Ok(RateCsv { quantity, rows, paper_exponent })
}

fn decades(lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.log10().floor() as i32, hi.log10().ceil() as i32);
    (a..=b).map(|k| 10f64.powi(k)).filter(|v| *v >= lo * (1.0 - 1e-12) && *v <= hi * (1.0 + 1e-12)).collect()
}

/// SVG with a fixed `0 0 640 480` view box: samples, least-squares line and, when known, a
/// dashed reference line with the predicted exponent through the first sample.
pub fn render_svg(t: &RateCsv) -> String {
    let xs: Vec<f64> = t.rows.iter().map(|r| r.1).collect();
    let ys: Vec<f64> = t.rows.iter().map(|r| r.2).collect();
    let span = |v: &[f64]| {
        let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), x| (a.min(*x), b.max(*x)));
        // pad by a tenth of a decade on each side
        let pad = 10f64.powf(0.1);
        (lo / pad, hi * pad)
    };
    let (x0, x1) = span(&xs);
    let (y0, y1) = span(&ys);
    let px = |x: f64| LEFT + (x.log10() - x0.log10()) / (x1.log10() - x0.log10()) * (WIDTH - LEFT - RIGHT);
    let py = |y: f64| HEIGHT - BOTTOM - (y.log10() - y0.log10()) / (y1.log10() - y0.log10()) * (HEIGHT - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 640 480" width="640" height="480">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="640" height="480" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
    for x in decades(x0, x1) {
        let p = px(x);
        let _ = writeln!(s, r#"<line x1="{p:.2}" y1="{:.2}" x2="{p:.2}" y2="{TOP}" stroke="lightgray"/>"#, HEIGHT - BOTTOM);
        let _ = writeln!(s, r#"<text x="{p:.2}" y="{:.2}" font-size="12" text-anchor="middle">{x:e}</text>"#, HEIGHT - BOTTOM + 18.0);
    }
    for y in decades(y0, y1) {
        let p = py(y);
        let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{p:.2}" x2="{:.2}" y2="{p:.2}" stroke="lightgray"/>"#, WIDTH - RIGHT);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{y:e}</text>"#, LEFT - 6.0, p + 4.0);
    }
    let fit = fit_rate(&t.rows.iter().map(|r| (r.1, r.2)).collect::<Vec<_>>()).ok();
    if let Some(f) = fit {
        let line = |x: f64| (f.intercept + f.slope * x.ln()).exp();
        let (a, b) = (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(0.0, f64::max));
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="steelblue" stroke-width="2"/>"#,
            px(a),
            py(line(a)),
            px(b),
            py(line(b))
        );
    }
    if let Some(e) = t.paper_exponent {
        let (xr, yr) = (xs[0], ys[0]);
        let other = xs.iter().copied().fold(xr, |m, x| if (x / xr).ln().abs() > (m / xr).ln().abs() { x } else { m });
        let yo = yr * (other / xr).powf(e);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="6 4"/>"#,
            px(xr),
            py(yr),
            px(other),
            py(yo)
        );
    }
    for (n, x, y) in &t.rows {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="crimson"><title>n = {n}</title></circle>"#, px(*x), py(*y));
    }
    let title = match (fit, t.paper_exponent) {
        (Some(f), Some(e)) => format!("{}: fitted slope {:.3}, predicted {e}", t.quantity, f.slope),
        (Some(f), None) => format!("{}: fitted slope {:.3}", t.quantity, f.slope),
        _ => t.quantity.clone(),
    };
    let _ = writeln!(s, r#"<text x="320" y="28" font-size="16" text-anchor="middle">{title}</text>"#);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">||d_n||_L1</text>"#, LEFT + 0.5 * (WIDTH - LEFT - RIGHT), HEIGHT - 16.0);
    let _ = writeln!(s, r#"<text x="18" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#, TOP + 0.5 * (HEIGHT - TOP - BOTTOM), TOP + 0.5 * (HEIGHT - TOP - BOTTOM), t.quantity);
    s.push_str("</svg>\n");
    s
}
