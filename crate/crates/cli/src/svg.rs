//! Minimal self-contained SVG line plots, one 800×500 panel per plot,
//! stacked vertically.

use std::fmt::Write;

pub const WIDTH: f64 = 800.0;
pub const PANEL_HEIGHT: f64 = 500.0;

const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

pub struct Series<'a> {
    pub label: &'a str,
    pub xs: &'a [f64],
    pub ys: Vec<f64>,
    pub color: &'a str,
    /// SVG `stroke-dasharray`, if any.
    pub dash: Option<&'a str>,
}

pub struct Panel<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_x: bool,
    pub series: Vec<Series<'a>>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Round step from {1, 2, 5} × 10ⁿ giving about `target` intervals.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let m = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 6.0);
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.0e}")
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 0.0 {
        let pad = if hi == 0.0 { 1.0 } else { hi.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn render_panel(out: &mut String, panel: &Panel, y0: f64) {
    let pw = WIDTH - LEFT - RIGHT;
    let ph = PANEL_HEIGHT - TOP - BOTTOM;
    let fx = |x: f64| if panel.log_x { x.log10() } else { x };
    let (xl, xh) = range(panel.series.iter().flat_map(|s| s.xs.iter().map(|&x| fx(x))));
    let (_, yh) = range(panel.series.iter().flat_map(|s| s.ys.iter().copied()));
    let (yl, yh) = (0.0, if yh > 0.0 { yh * 1.05 } else { 1.0 });
    let px = |x: f64| LEFT + (fx(x) - xl) / (xh - xl) * pw;
    let py = |y: f64| y0 + TOP + ph - (y - yl) / (yh - yl) * ph;

    let _ =
        writeln!(out, r##"<rect x="{LEFT}" y="{}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>"##, y0 + TOP);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="16">{}</text>"#,
        LEFT + pw / 2.0,
        y0 + 24.0,
        escape(panel.title)
    );

    let xticks: Vec<f64> = if panel.log_x {
        (xl.ceil() as i32..=xh.floor() as i32).map(|e| 10f64.powi(e)).collect()
    } else {
        linear_ticks(xl, xh)
    };
    for t in xticks {
        let x = px(t);
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"##,
            y0 + TOP + ph,
            y0 + TOP + ph + 6.0,
            y0 + TOP + ph + 20.0,
            tick_label(t)
        );
    }
    for t in linear_ticks(yl, yh) {
        let y = py(t);
        let _ = writeln!(
            out,
            r##"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#000"/><text x="{}" y="{:.2}" text-anchor="end" font-size="12">{}</text>"##,
            LEFT - 6.0,
            LEFT - 9.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        y0 + PANEL_HEIGHT - 15.0,
        escape(panel.x_label)
    );
    let (lx, ly) = (20.0, y0 + TOP + ph / 2.0);
    let _ = writeln!(
        out,
        r#"<text x="{lx}" y="{ly}" text-anchor="middle" font-size="14" transform="rotate(-90 {lx} {ly})">{}</text>"#,
        escape(panel.y_label)
    );

    for (k, s) in panel.series.iter().enumerate() {
        let mut d = String::new();
        let mut pen_down = false;
        for (&x, &y) in s.xs.iter().zip(&s.ys) {
            if !(x.is_finite() && y.is_finite()) || (panel.log_x && x <= 0.0) {
                pen_down = false;
                continue;
            }
            let _ = write!(d, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, px(x), py(y));
            pen_down = true;
        }
        let dash = s.dash.map(|v| format!(r#" stroke-dasharray="{v}""#)).unwrap_or_default();
        let _ =
            writeln!(out, r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.5"{dash}/>"#, d.trim_end(), s.color);
        let ly = y0 + TOP + 16.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT - 190.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="1.5"{dash}/><text x="{}" y="{}" font-size="12">{}</text>"#,
            lx + 30.0,
            s.color,
            lx + 36.0,
            ly + 4.0,
            escape(s.label)
        );
    }
}

pub fn render(panels: &[Panel]) -> String {
    let height = PANEL_HEIGHT * panels.len() as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    for (i, p) in panels.iter().enumerate() {
        render_panel(&mut out, p, PANEL_HEIGHT * i as f64);
    }
    out.push_str("</svg>\n");
    out
}
