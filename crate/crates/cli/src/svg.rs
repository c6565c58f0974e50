//! Static SVG of a solved polygon.

use std::fmt::Write;

use geocenter::Point;

pub struct Picture<'a> {
    pub polygon: &'a [Point],
    pub center: Point,
    pub radius: f64,
    /// Shortest paths from the center to its farthest vertices.
    pub paths: Vec<Vec<Point>>,
}

const SIZE: f64 = 600.0;

impl Picture<'_> {
    pub fn render(&self) -> String {
        let (mut lo, mut hi) = (self.center, self.center);
        for p in self.polygon {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
        let margin = 0.05 * span;
        let k = SIZE / (span + 2.0 * margin);
        // SVG's y axis points down.
        let map = |p: Point| ((p.x - lo.x + margin) * k, (hi.y - p.y + margin) * k);
        let pts = |v: &[Point]| {
            v.iter()
                .map(|&p| {
                    let (x, y) = map(p);
                    format!("{x:.3},{y:.3}")
                })
                .collect::<Vec<_>>()
                .join(" ")
        };
        let (w, h) = (
            (hi.x - lo.x + 2.0 * margin) * k,
            (hi.y - lo.y + 2.0 * margin) * k,
        );
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.3} {h:.3}">"#
        );
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="#eef3fa" stroke="#234" stroke-width="1.5"/>"##,
            pts(self.polygon)
        );
        let (cx, cy) = map(self.center);
        let _ = writeln!(
            s,
            r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="#c33" stroke-dasharray="6 4"/>"##,
            self.radius * k
        );
        for path in &self.paths {
            let _ = writeln!(
                s,
                r##"<polyline points="{}" fill="none" stroke="#c33" stroke-width="1.2"/>"##,
                pts(path)
            );
        }
        let _ = writeln!(
            s,
            r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="4" fill="#c33"/>"##
        );
        s.push_str("</svg>\n");
        s
    }
}
