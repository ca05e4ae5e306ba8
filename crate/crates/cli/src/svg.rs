//! Static phase-plane plots: one trajectory plus the zero set of the curve.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;
const CURVE_SAMPLES: usize = 600;
const MAX_TRAJECTORY_POINTS: usize = 2000;

/// Axis-aligned viewport in phase-plane coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

fn padded((lo, hi): (f64, f64)) -> (f64, f64) {
    let span = hi - lo;
    let span = if span > 0.0 { span } else { lo.abs().max(1.0) };
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - span / 2.0, lo + span / 2.0) };
    (lo - 0.1 * span, hi + 0.1 * span)
}

impl Viewport {
    /// Bounding box of the finite points, widened by 10% of its extent on every side.
    pub fn around(points: &[(f64, f64)]) -> Option<Viewport> {
        let finite: Vec<&(f64, f64)> = points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        if finite.is_empty() {
            return None;
        }
        let fold = |sel: fn(&(f64, f64)) -> f64| {
            finite
                .iter()
                .map(|p| sel(p))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let (x_min, x_max) = padded(fold(|p| p.0));
        let (y_min, y_max) = padded(fold(|p| p.1));
        Some(Viewport { x_min, x_max, y_min, y_max })
    }

    fn contains_y(&self, y: f64) -> bool {
        y.is_finite() && y >= self.y_min && y <= self.y_max
    }

    fn px(self, x: f64, y: f64) -> (f64, f64) {
        let u = MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN);
        let v = HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN);
        (u, v)
    }
}

fn polyline(out: &mut String, vp: &Viewport, pts: &[(f64, f64)], style: &str) {
    if pts.len() < 2 {
        return;
    }
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| {
            let (u, v) = vp.px(x, y);
            format!("{u:.2},{v:.2}")
        })
        .collect();
    let _ = writeln!(out, r#"<polyline fill="none" {style} points="{}"/>"#, coords.join(" "));
}

/// Renders the trajectory and the branches of `y = branch(x)` that fall inside the viewport.
pub fn phase_plot(trajectory: &[(f64, f64)], branch: impl Fn(f64) -> Option<f64>, title: &str) -> Option<String> {
    let vp = Viewport::around(trajectory)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="#888"/>"##,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="28" font-family="monospace" font-size="13">{}</text>"#, escape(title));
    let (left, bottom) = vp.px(vp.x_min, vp.y_min);
    let (right, top) = vp.px(vp.x_max, vp.y_max);
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, text: String| {
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="monospace" font-size="11" text-anchor="{anchor}">{text}</text>"#
        );
    };
    label(&mut s, left, bottom + 16.0, "start", format!("{:.4}", vp.x_min));
    label(&mut s, right, bottom + 16.0, "end", format!("x = {:.4}", vp.x_max));
    label(&mut s, left - 4.0, bottom, "end", format!("{:.4}", vp.y_min));
    label(&mut s, left - 4.0, top + 4.0, "end", format!("{:.4}", vp.y_max));

    let mut segment: Vec<(f64, f64)> = Vec::new();
    for i in 0..=CURVE_SAMPLES {
        let x = vp.x_min + (vp.x_max - vp.x_min) * i as f64 / CURVE_SAMPLES as f64;
        match branch(x).filter(|&y| vp.contains_y(y)) {
            Some(y) => segment.push((x, y)),
            None => {
                polyline(&mut s, &vp, &segment, r##"stroke="#c0392b" stroke-width="1.5" stroke-dasharray="6 3""##);
                segment.clear();
            }
        }
    }
    polyline(&mut s, &vp, &segment, r##"stroke="#c0392b" stroke-width="1.5" stroke-dasharray="6 3""##);

    let finite: Vec<(f64, f64)> = trajectory.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let stride = finite.len().div_ceil(MAX_TRAJECTORY_POINTS).max(1);
    let mut thinned: Vec<(f64, f64)> = finite.iter().copied().step_by(stride).collect();
    if let Some(&last) = finite.last() {
        if thinned.last() != Some(&last) {
            thinned.push(last);
        }
    }
    polyline(&mut s, &vp, &thinned, r##"stroke="#1f4e9c" stroke-width="1.5""##);
    if let Some(&(x, y)) = finite.first() {
        let (u, v) = vp.px(x, y);
        let _ = writeln!(s, r##"<circle cx="{u:.2}" cy="{v:.2}" r="3.5" fill="#1f4e9c"/>"##);
    }
    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11" text-anchor="end" fill="#1f4e9c">trajectory</text>"##,
        right,
        top - 18.0
    );
    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="11" text-anchor="end" fill="#c0392b">F = 0</text>"##,
        right,
        top - 6.0
    );
    s.push_str("</svg>\n");
    Some(s)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
