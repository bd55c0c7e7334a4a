//! Static SVG rendering of recovery curves with error bars.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::sweep::SweepCurve;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn x_px(ratio: f64) -> f64 {
    LEFT + ratio.clamp(0.0, 1.0) * (WIDTH - LEFT - RIGHT)
}

fn y_px(percent: f64) -> f64 {
    HEIGHT - BOTTOM - percent.clamp(0.0, 100.0) / 100.0 * (HEIGHT - TOP - BOTTOM)
}

/// Renders all curves on one pair of axes (decoding ratio vs. recovery %).
pub fn render_plot(curves: &[SweepCurve], title: &str) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::param("plot needs at least one curve"));
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        escape(title)
    );

    // axes and grid
    let (x0, x1, y0, y1) = (x_px(0.0), x_px(1.0), y_px(0.0), y_px(100.0));
    let _ = writeln!(
        s,
        r#"<path class="axes" d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
    );
    for i in 0..=10 {
        let r = i as f64 / 10.0;
        let x = x_px(r);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{r:.1}</text>"#,
            y0 + 5.0,
            y0 + 18.0
        );
    }
    for i in 0..=10 {
        let p = i as f64 * 10.0;
        let y = y_px(p);
        let _ = writeln!(
            s,
            r##"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{p:.0}</text>"##,
            x0 - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text class="xlabel" x="{:.2}" y="{:.2}" text-anchor="middle">decoding ratio</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text class="ylabel" x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">average successful decoding %</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    for (ci, c) in curves.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let _ = writeln!(s, r#"<g class="curve" stroke="{color}" fill="{color}">"#);
        let pts: Vec<String> = c
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", x_px(p.query_ratio), y_px(p.mean)))
            .collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none"/>"#, pts.join(" "));
        for p in &c.points {
            let x = x_px(p.query_ratio);
            if p.stddev > 0.0 {
                let (lo, hi) = (y_px(p.mean - p.stddev), y_px(p.mean + p.stddev));
                let _ = writeln!(
                    s,
                    r#"<path class="errorbar" d="M{x:.2},{lo:.2} L{x:.2},{hi:.2} M{:.2},{lo:.2} L{:.2},{lo:.2} M{:.2},{hi:.2} L{:.2},{hi:.2}"/>"#,
                    x - 3.0,
                    x + 3.0,
                    x - 3.0,
                    x + 3.0
                );
            }
            let _ = writeln!(
                s,
                r#"<circle class="marker" cx="{x:.2}" cy="{:.2}" r="3"/>"#,
                y_px(p.mean)
            );
        }
        let _ = writeln!(s, "</g>");

        let ly = TOP + 10.0 + 20.0 * ci as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<g class="legend-entry"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{} n={} M={}</text></g>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            c.algorithm,
            c.n,
            c.buffer
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes [`render_plot`] output to `path`.
pub fn emit_plot(curves: &[SweepCurve], title: &str, path: &Path) -> Result<()> {
    let svg = render_plot(curves, title)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Algorithm;
    use crate::harness::sweep::SweepPoint;

    fn flat(algorithm: Algorithm) -> SweepCurve {
        SweepCurve {
            algorithm,
            n: 50,
            buffer: 5,
            points: (1..=10)
                .map(|i| SweepPoint {
                    query_ratio: i as f64 / 10.0,
                    mean: 100.0,
                    stddev: 0.0,
                    trials: 30,
                    skipped: 0,
                })
                .collect(),
        }
    }

    #[test]
    fn flat_curve_has_ten_markers() {
        let svg = render_plot(&[flat(Algorithm::Mdsa)], "n=50").unwrap();
        assert_eq!(svg.matches(r#"class="marker""#).count(), 10);
        assert_eq!(svg.matches(r#"class="errorbar""#).count(), 0);
        assert!(svg.contains(">decoding ratio<"));
        assert!(svg.contains(">average successful decoding %<"));
    }

    #[test]
    fn two_curves_two_legend_entries() {
        let svg = render_plot(&[flat(Algorithm::Mdsa), flat(Algorithm::Dsa1)], "cmp").unwrap();
        assert_eq!(svg.matches(r#"class="legend-entry""#).count(), 2);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(render_plot(&[], "x").is_err());
    }
}
