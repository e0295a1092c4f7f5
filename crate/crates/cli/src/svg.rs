//! Minimal single-panel line chart written directly as SVG text.

use std::fmt::Write as _;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 70.0;
const MAX_POINTS: usize = 2000;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Coordinates printed with four decimals keep the file deterministic and small.
fn coord(x: f64) -> String {
    format!("{x:.4}")
}

impl LinePlot {
    fn ranges(&self) -> ((f64, f64), (f64, f64)) {
        let pts = self.series.iter().flat_map(|s| s.points.iter());
        let (mut x_max, mut y_max, mut y_min) = (0.0f64, 1.0f64, 0.0f64);
        for &(x, y) in pts {
            x_max = x_max.max(x);
            y_max = y_max.max(y);
            y_min = y_min.min(y);
        }
        if x_max <= 0.0 {
            x_max = 1.0;
        }
        ((0.0, x_max), (y_min, y_max))
    }

    pub fn render(&self) -> String {
        let ((x0, x1), (y0, y1)) = self.ranges();
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * plot_h;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="30" text-anchor="middle" font-size="18">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        // Axes box and ticks.
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );
        for k in 0..=5 {
            let fx = x0 + (x1 - x0) * k as f64 / 5.0;
            let px = sx(fx);
            let _ = writeln!(
                out,
                r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/><text x="{0}" y="{3}" text-anchor="middle" font-size="12">{4}</text>"#,
                coord(px),
                HEIGHT - MARGIN_BOTTOM,
                HEIGHT - MARGIN_BOTTOM + 6.0,
                HEIGHT - MARGIN_BOTTOM + 22.0,
                format_tick(fx)
            );
            let fy = y0 + (y1 - y0) * k as f64 / 5.0;
            let py = sy(fy);
            let _ = writeln!(
                out,
                r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/><text x="{3}" y="{4}" text-anchor="end" font-size="12">{5}</text>"#,
                MARGIN_LEFT - 6.0,
                coord(py),
                MARGIN_LEFT,
                MARGIN_LEFT - 10.0,
                coord(py + 4.0),
                format_tick(fy)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="16">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 20.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="25" y="{0}" text-anchor="middle" font-size="16" transform="rotate(-90 25 {0})">{1}</text>"#,
            MARGIN_TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let stride = s.points.len().div_ceil(MAX_POINTS).max(1);
            let mut pts: Vec<String> = s
                .points
                .iter()
                .step_by(stride)
                .map(|&(x, y)| format!("{},{}", coord(sx(x)), coord(sy(y))))
                .collect();
            if let Some(&(x, y)) = s.points.last() {
                if (s.points.len() - 1) % stride != 0 {
                    pts.push(format!("{},{}", coord(sx(x)), coord(sy(y))));
                }
            }
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"><title>{}</title></polyline>"#,
                pts.join(" "),
                escape(&s.label)
            );
        }

        // Legend in the upper-right corner.
        let lx = WIDTH - MARGIN_RIGHT - 170.0;
        let ly = MARGIN_TOP + 15.0;
        let _ = writeln!(
            out,
            r#"<g class="legend"><rect x="{}" y="{}" width="160" height="{}" fill="white" stroke="gray"/>"#,
            lx - 5.0,
            ly - 12.0,
            self.series.len() as f64 * 20.0 + 8.0
        );
        for (k, s) in self.series.iter().enumerate() {
            let y = ly + 20.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}" font-size="13">{}</text>"#,
                lx + 25.0,
                PALETTE[k % PALETTE.len()],
                lx + 32.0,
                y + 4.0,
                escape(&s.label)
            );
        }
        out.push_str("</g>\n</svg>\n");
        out
    }
}

fn format_tick(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}
