//! Minimal SVG plots of needle traces.

use std::fmt::Write as _;

use needle_core::{Point, TargetSpec};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;

pub struct Polyline<'a> {
    pub points: &'a [Point],
    pub stroke: &'a str,
    pub width: f64,
}

#[derive(Default)]
pub struct Plot<'a> {
    pub lines: Vec<Polyline<'a>>,
    pub markers: Vec<Point>,
    pub windows: Vec<TargetSpec>,
}

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn fit(plot: &Plot<'_>) -> Self {
        let mut pts: Vec<(f64, f64)> = plot
            .lines
            .iter()
            .flat_map(|l| l.points.iter())
            .chain(plot.markers.iter())
            .map(|p| (p.x as f64, p.y as f64))
            .collect();
        for w in &plot.windows {
            pts.push(((w.x - w.dev) as f64, (w.y - w.dev) as f64));
            pts.push(((w.x + w.dev) as f64, (w.y + w.dev) as f64));
        }
        if pts.is_empty() {
            pts.push((0.0, 0.0));
        }
        let min_x = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let max_x = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let min_y = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let max_y = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let span = (max_x - min_x).max(max_y - min_y).max(1.0);
        let scale = (WIDTH - 2.0 * MARGIN) / span;
        let height = (max_y - min_y) * scale + 2.0 * MARGIN;
        Self {
            min_x,
            max_y,
            scale,
            height,
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            (x - self.min_x) * self.scale + MARGIN,
            (self.max_y - y) * self.scale + MARGIN,
        )
    }
}

/// Renders the plot; +y points up.
pub fn render(plot: &Plot<'_>) -> String {
    let frame = Frame::fit(plot);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#,
        w = WIDTH,
        h = frame.height
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for w in &plot.windows {
        let (x, y) = frame.map((w.x - w.dev) as f64, (w.y + w.dev) as f64);
        let side = (2 * w.dev) as f64 * frame.scale;
        let _ = writeln!(
            out,
            r#"<rect class="target" x="{x:.2}" y="{y:.2}" width="{side:.2}" height="{side:.2}" fill="none" stroke="orange" stroke-width="1"/>"#
        );
    }
    for line in &plot.lines {
        let coords: Vec<String> = line
            .points
            .iter()
            .map(|p| {
                let (x, y) = frame.map(p.x as f64, p.y as f64);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="{:.1}"/>"#,
            coords.join(" "),
            line.stroke,
            line.width
        );
    }
    for m in &plot.markers {
        let (x, y) = frame.map(m.x as f64, m.y as f64);
        let _ = writeln!(
            out,
            r#"<circle class="rotation" cx="{x:.2}" cy="{y:.2}" r="4" fill="red"/>"#
        );
    }
    out.push_str("</svg>\n");
    out
}
