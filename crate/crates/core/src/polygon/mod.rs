//! Read-only simple polygons, validation and containment.

mod region;
mod triangulate;

pub use region::{
    balanced_vertical_chord, choose_shear, materialize_small_region, region_vertex_count,
    split_region, vertical_ray_hits_batch, BoundaryPos, BoundaryRun, ChordSplit,
    MaterializedRegion, RayHits, RegionVertex, Shear, VerticalChord, Wall, SMALL_REGION,
};
pub use triangulate::{ear_clip_triangulate, Triangulation};

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{orient, Point};

/// A simple polygon with counter-clockwise vertices. The vertex array is
/// shared and never mutated after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Arc<[Point]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    TooFewVertices(usize),
    NonFinite(usize),
    RepeatedVertex(usize, usize),
    /// Edges `i -> i+1` and `j -> j+1` intersect.
    EdgesIntersect(usize, usize),
    Clockwise,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::TooFewVertices(n) => write!(f, "only {n} vertices"),
            Violation::NonFinite(i) => write!(f, "vertex {i} is not finite"),
            Violation::RepeatedVertex(i, j) => write!(f, "vertices {i} and {j} coincide"),
            Violation::EdgesIntersect(i, j) => write!(f, "edges {i} and {j} intersect"),
            Violation::Clockwise => write!(f, "vertices are in clockwise order"),
        }
    }
}

pub fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += v[i].cross(v[(i + 1) % n]);
    }
    0.5 * acc
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed segments `ab` and `cd` share at least one point.
pub(crate) fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        return true;
    }
    (o1 == 0 && on_segment(a, b, c))
        || (o2 == 0 && on_segment(a, b, d))
        || (o3 == 0 && on_segment(c, d, a))
        || (o4 == 0 && on_segment(c, d, b))
}

/// Checks simplicity, orientation and distinctness in `O(n^2)`.
pub fn validate_simple(v: &[Point]) -> std::result::Result<(), Vec<Violation>> {
    let n = v.len();
    let mut out = Vec::new();
    if n < 3 {
        out.push(Violation::TooFewVertices(n));
        return Err(out);
    }
    for (i, p) in v.iter().enumerate() {
        if !p.is_finite() {
            out.push(Violation::NonFinite(i));
        }
    }
    if !out.is_empty() {
        return Err(out);
    }
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&i, &j| v[i].x.total_cmp(&v[j].x).then(v[i].y.total_cmp(&v[j].y)));
    for w in sorted.windows(2) {
        if v[w[0]] == v[w[1]] {
            out.push(Violation::RepeatedVertex(w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in (i + 1)..n {
            let (c, d) = (v[j], v[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Adjacent edges may only share their common vertex.
                let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                if orient(p, shared, q) == 0 && (q - shared).dot(p - shared) > 0.0 {
                    out.push(Violation::EdgesIntersect(i, j));
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                out.push(Violation::EdgesIntersect(i, j));
            }
        }
    }
    if out.is_empty() && signed_area(v) <= 0.0 {
        out.push(Violation::Clockwise);
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if let Err(v) = validate_simple(&vertices) {
            let msg: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            return Err(Error::InvalidPolygon(msg.join("; ")));
        }
        Ok(Self {
            vertices: vertices.into(),
        })
    }

    /// Skips validation. Callers must guarantee a simple CCW polygon.
    pub fn new_unchecked(vertices: Vec<Point>) -> Self {
        Self {
            vertices: vertices.into(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> Point {
        self.vertices[i]
    }

    #[inline]
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    #[inline]
    pub fn next(&self, i: usize) -> usize {
        if i + 1 == self.len() {
            0
        } else {
            i + 1
        }
    }

    #[inline]
    pub fn prev(&self, i: usize) -> usize {
        if i == 0 {
            self.len() - 1
        } else {
            i - 1
        }
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    #[inline]
    pub fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertices[i], self.vertices[self.next(i)])
    }

    /// Does the ray from vertex `i` along `d` start inside the closed
    /// polygon? Directions along an incident edge count as inside.
    pub fn admits(&self, i: usize, d: Point) -> bool {
        let w = self.vertices[i];
        let e1 = self.vertices[self.next(i)] - w;
        let e2 = self.vertices[self.prev(i)] - w;
        let c1 = e1.cross(d) / (e1.norm() * d.norm());
        let c2 = d.cross(e2) / (e2.norm() * d.norm());
        let tiny = 1e-12;
        if e1.cross(e2) > 0.0 {
            c1 >= -tiny && c2 >= -tiny
        } else {
            !(c1 < -tiny && c2 < -tiny)
        }
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in self.vertices.iter() {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Diagonal of the bounding box; an upper bound on the Euclidean diameter.
    pub fn scale(&self) -> f64 {
        let (lo, hi) = self.bbox();
        lo.dist(hi)
    }

    /// Distance from `p` to the boundary.
    pub fn boundary_dist(&self, p: Point) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                point_segment_dist(p, a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Strictly inside (`1`), on the boundary (`0`), or outside (`-1`), with
    /// boundary decided exactly.
    pub fn locate(&self, p: Point) -> i8 {
        let n = self.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = self.edge(i);
            if orient(a, b, p) == 0 && on_segment(a, b, p) {
                return 0;
            }
            if (a.y > p.y) != (b.y > p.y) {
                let o = orient(a, b, p);
                // Crossing to the right of p.
                if (b.y > a.y && o > 0) || (b.y < a.y && o < 0) {
                    inside = !inside;
                }
            }
        }
        if inside {
            1
        } else {
            -1
        }
    }

    /// Closed containment with a distance tolerance on the boundary.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        match self.locate(p) {
            -1 => self.boundary_dist(p) <= tol,
            _ => true,
        }
    }

    /// The closed segment `ab` lies in the closed polygon.
    pub fn segment_inside(&self, a: Point, b: Point) -> bool {
        let n = self.len();
        let mut cuts = vec![0.0, 1.0];
        let d = b - a;
        let len2 = d.norm2();
        if len2 == 0.0 {
            return self.locate(a) >= 0;
        }
        for i in 0..n {
            let (c, e) = self.edge(i);
            let o1 = orient(a, b, c);
            let o2 = orient(a, b, e);
            let o3 = orient(c, e, a);
            let o4 = orient(c, e, b);
            if o1 * o2 < 0 && o3 * o4 < 0 {
                return false;
            }
            if o1 == 0 {
                let t = (c - a).dot(d) / len2;
                if t > 0.0 && t < 1.0 {
                    cuts.push(t);
                }
            }
        }
        cuts.sort_by(|x, y| x.total_cmp(y));
        cuts.dedup();
        // Midpoints of pieces running along an edge are off it by rounding.
        let tol = 1e-12 * self.scale();
        cuts.windows(2)
            .all(|w| self.contains(a.lerp(b, 0.5 * (w[0] + w[1])), tol))
    }
}

pub fn point_segment_dist(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(a + d * t)
}
