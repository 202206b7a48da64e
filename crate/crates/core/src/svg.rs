//! Minimal SVG output for search traces and bisector experiments.
//!
//! Presentation only: nothing reads these files back.

use std::fmt::Write;

use crate::bisector::BisectorTrace;
use crate::geom::{Vec2, Window};
use crate::search::{CopyCertificate, SearchTrace};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 30.0;
const PALETTE: [&str; 2] = ["#1f77b4", "#d62728"];
const CURVES: [&str; 4] = ["#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Maps world coordinates into a fixed-width canvas with y pointing up.
struct Canvas {
    min: Vec2,
    scale: f64,
    height: f64,
    body: String,
}

impl Canvas {
    fn new(window: &Window) -> Self {
        let w = (window.max.x - window.min.x).max(1e-12);
        let h = (window.max.y - window.min.y).max(1e-12);
        let scale = (WIDTH - 2.0 * MARGIN) / w.max(h);
        Canvas { min: window.min, scale, height: h * scale + 2.0 * MARGIN, body: String::new() }
    }

    fn fit(points: impl IntoIterator<Item = Vec2>) -> Self {
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
            max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
        }
        if !min.is_finite() || !max.is_finite() {
            return Canvas::new(&Window::square(1.0));
        }
        let pad = 0.05 * (max.x - min.x).max(max.y - min.y).max(1e-9);
        Canvas::new(&Window::new(min - Vec2::new(pad, pad), max + Vec2::new(pad, pad)))
    }

    fn map(&self, p: Vec2) -> (f64, f64) {
        let x = MARGIN + (p.x - self.min.x) * self.scale;
        let y = self.height - MARGIN - (p.y - self.min.y) * self.scale;
        (x, y)
    }

    fn line(&mut self, a: Vec2, b: Vec2, stroke: &str, width: f64) {
        let (x1, y1) = self.map(a);
        let (x2, y2) = self.map(b);
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{stroke}" stroke-width="{width}"/>"#
        );
    }

    fn polyline(&mut self, pts: &[Vec2], stroke: &str) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
            coords.join(" ")
        );
    }

    fn dot(&mut self, p: Vec2, r: f64, fill: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r}" fill="{fill}" stroke="black" stroke-width="0.5"/>"#
        );
    }

    fn label(&mut self, p: Vec2, text: &str) {
        let (x, y) = self.map(p);
        let _ = writeln!(self.body, r#"<text x="{:.3}" y="{:.3}" font-size="11">{text}</text>"#, x + 4.0, y - 4.0);
    }

    fn finish(self, title: &str) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{h:.0}\" viewBox=\"0 0 {WIDTH} {h:.3}\">\n\
             <title>{title}</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            h = self.height,
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Segments examined by the search, labelled `I0, I1, …`, with the final copy on top.
pub fn search_svg(trace: &SearchTrace, cert: &CopyCertificate) -> String {
    let segments: Vec<_> = trace.segments().collect();
    let points = segments
        .iter()
        .flat_map(|s| s.endpoints)
        .chain(cert.points.points.iter().copied());
    let mut c = Canvas::fit(points);
    for (i, s) in segments.iter().enumerate() {
        c.line(s.endpoints[0], s.endpoints[1], PALETTE[usize::from(s.colour.min(1))], 2.0);
        c.label(s.endpoints[0].lerp(s.endpoints[1], 0.5), &format!("I{i}"));
    }
    let fill = PALETTE[usize::from(cert.colour.min(1))];
    for &p in &cert.points.points {
        c.dot(p, 4.0, fill);
    }
    c.finish(&escape(&format!("copy of G({}) under {}", cert.points.q, cert.oracle)))
}

/// Traced bisectors inside `window`, with intersection markers.
pub fn bisector_svg(traces: &[BisectorTrace], intersections: &[Vec2], window: &Window) -> String {
    let mut c = Canvas::new(window);
    let corners = [
        window.min,
        Vec2::new(window.max.x, window.min.y),
        window.max,
        Vec2::new(window.min.x, window.max.y),
        window.min,
    ];
    c.polyline(&corners, "#cccccc");
    for (i, t) in traces.iter().enumerate() {
        let stroke = CURVES[i % CURVES.len()];
        for chain in &t.chains {
            c.polyline(chain, stroke);
        }
        c.dot(t.spec.y1, 3.0, stroke);
        c.dot(t.spec.y2, 3.0, stroke);
    }
    for &p in intersections {
        c.dot(p, 5.0, "black");
    }
    let p = traces.first().map_or(2.0, |t| t.spec.p);
    c.finish(&format!("l{p} bisectors"))
}
