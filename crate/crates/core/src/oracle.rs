//! Brute-force ground truth.
//!
//! Everything here is deliberately slow and shares nothing with the streaming
//! pipeline except the orientation predicate: its own visibility test, its
//! own point-in-polygon test, all-pairs vertex distances over the visibility
//! graph, and plain golden-section searches exploiting convexity.

use crate::geom::{orient, CircleConstraint, Point, Segment};
use crate::polygon::Polygon;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    orient(a, b, p) == 0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

/// Closed point-in-polygon by crossing number.
pub fn point_in_closed(v: &[Point], p: Point) -> bool {
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if on_segment(a, b, p) {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

fn near_boundary(v: &[Point], p: Point, tol: f64) -> bool {
    let n = v.len();
    (0..n).any(|i| {
        let (a, b) = (v[i], v[(i + 1) % n]);
        let d = b - a;
        let t = ((p - a).dot(d) / d.norm2()).clamp(0.0, 1.0);
        p.dist(a + d * t) <= tol
    })
}

/// Does direction `d` leave vertex `i` into the closed polygon?
fn wedge_admits(v: &[Point], i: usize, d: Point) -> bool {
    let n = v.len();
    let w = v[i];
    let e1 = v[(i + 1) % n] - w;
    let e2 = v[(i + n - 1) % n] - w;
    let tiny = 1e-12 * d.norm();
    let c1 = e1.cross(d) / e1.norm();
    let c2 = d.cross(e2) / e2.norm();
    if e1.cross(e2) > 0.0 {
        c1 >= -tiny && c2 >= -tiny
    } else {
        // Reflex or straight: only the convex exterior wedge is excluded.
        !(c1 < -tiny && c2 < -tiny)
    }
}

/// Orientation with a float filter in front of the exact predicate.
fn orient_fast(a: Point, b: Point, c: Point) -> i8 {
    let l = (b.x - a.x) * (c.y - a.y);
    let r = (b.y - a.y) * (c.x - a.x);
    let det = l - r;
    let bound = 1e-15 * (l.abs() + r.abs());
    if det > bound {
        1
    } else if det < -bound {
        -1
    } else {
        orient(a, b, c)
    }
}

/// Where a segment endpoint sits relative to the boundary.
#[derive(Debug, Clone)]
enum Anchor {
    Vertex(usize),
    Edges(Vec<usize>),
    Inside,
    Outside,
}

fn anchor(v: &[Point], a: Point, tol: f64) -> Anchor {
    let n = v.len();
    if let Some(i) = (0..n).find(|&i| v[i].dist(a) <= tol) {
        return Anchor::Vertex(i);
    }
    let edges: Vec<usize> = (0..n)
        .filter(|&i| {
            let (c, e) = (v[i], v[(i + 1) % n]);
            let t = ((a - c).dot(e - c) / (e - c).norm2()).clamp(0.0, 1.0);
            a.dist(c.lerp(e, t)) <= tol
        })
        .collect();
    if !edges.is_empty() {
        Anchor::Edges(edges)
    } else if point_in_closed(v, a) {
        Anchor::Inside
    } else {
        Anchor::Outside
    }
}

/// Does direction `d` leave the anchored endpoint into the closed polygon?
fn admits(v: &[Point], at: &Anchor, d: Point) -> bool {
    let n = v.len();
    match at {
        Anchor::Vertex(i) => wedge_admits(v, *i, d),
        Anchor::Edges(es) => es.iter().all(|&i| {
            let u = v[(i + 1) % n] - v[i];
            u.cross(d) >= -1e-12 * u.norm() * d.norm()
        }),
        Anchor::Inside => true,
        Anchor::Outside => false,
    }
}

/// No proper crossing, and every vertex touched strictly between `a` and
/// `b` lets the segment pass on both sides.
fn clear_between(v: &[Point], a: Point, b: Point, tol: f64) -> bool {
    let n = v.len();
    let d = b - a;
    let l2 = d.norm2();
    let o_first = orient_fast(a, b, v[0]);
    let mut o1 = o_first;
    for i in 0..n {
        let (c, e) = (v[i], v[(i + 1) % n]);
        let o2 = if i + 1 == n {
            o_first
        } else {
            orient_fast(a, b, e)
        };
        if o1 * o2 < 0 {
            let o3 = orient_fast(c, e, a);
            let o4 = orient_fast(c, e, b);
            // An endpoint on the edge up to rounding is a touch, not a crossing.
            if o3 * o4 < 0 && !near_boundary(&[c, e], a, tol) && !near_boundary(&[c, e], b, tol) {
                return false;
            }
        }
        if o1 == 0 {
            let t = (c - a).dot(d) / l2;
            let interior = t > 0.0 && t < 1.0 && c.dist(a) > tol && c.dist(b) > tol;
            if interior && !(wedge_admits(v, i, d) && wedge_admits(v, i, -d)) {
                return false;
            }
        }
        o1 = o2;
    }
    true
}

fn endpoint_tol(a: Point, b: Point) -> f64 {
    1e-12 * (1.0 + a.norm().max(b.norm()))
}

/// Segment `ab` lies in the closed polygon.
///
/// Without a proper crossing the segment can only leave the polygon where it
/// touches a vertex, so local tests at the touched vertices and at both ends
/// decide.
pub fn visible(v: &[Point], a: Point, b: Point) -> bool {
    let d = b - a;
    if d.norm2() == 0.0 {
        return point_in_closed(v, a);
    }
    let tol = endpoint_tol(a, b);
    admits(v, &anchor(v, a, tol), d)
        && admits(v, &anchor(v, b, tol), -d)
        && clear_between(v, a, b, tol)
}

/// Visibility graph over the polygon vertices with all-pairs geodesic
/// distances (Floyd-Warshall).
#[derive(Debug, Clone)]
pub struct VisibilityGraph {
    pts: Vec<Point>,
    dist: Vec<f64>,
}

impl VisibilityGraph {
    pub fn new(poly: &Polygon) -> Self {
        let pts = poly.vertices().to_vec();
        let n = pts.len();
        let mut dist = vec![f64::INFINITY; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let d = pts[j] - pts[i];
                let sees = wedge_admits(&pts, i, d)
                    && wedge_admits(&pts, j, -d)
                    && clear_between(&pts, pts[i], pts[j], endpoint_tol(pts[i], pts[j]));
                if adjacent || sees {
                    let d = pts[i].dist(pts[j]);
                    dist[i * n + j] = d;
                    dist[j * n + i] = d;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i * n + k];
                if !dik.is_finite() {
                    continue;
                }
                for j in 0..n {
                    let cand = dik + dist[k * n + j];
                    if cand < dist[i * n + j] {
                        dist[i * n + j] = cand;
                    }
                }
            }
        }
        Self { pts, dist }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn vertex_dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.pts.len() + j]
    }

    pub fn contains(&self, p: Point) -> bool {
        point_in_closed(&self.pts, p)
    }

    fn visible_from(&self, x: Point) -> Vec<usize> {
        let v = &self.pts;
        let tol = endpoint_tol(x, x);
        let at = anchor(v, x, tol);
        (0..v.len())
            .filter(|&u| {
                let d = v[u] - x;
                if v[u].dist(x) <= tol {
                    return true;
                }
                admits(v, &at, d)
                    && wedge_admits(v, u, -d)
                    && clear_between(v, x, v[u], endpoint_tol(x, v[u]))
            })
            .collect()
    }

    /// Geodesic distances from `x` to every vertex.
    pub fn distances_from(&self, x: Point) -> Vec<f64> {
        let n = self.pts.len();
        let vis = self.visible_from(x);
        let mut out = vec![f64::INFINITY; n];
        for &u in &vis {
            let du = x.dist(self.pts[u]);
            let row = &self.dist[u * n..(u + 1) * n];
            for (o, &r) in out.iter_mut().zip(row) {
                *o = o.min(du + r);
            }
        }
        out
    }

    /// Geodesic radius `g(x)`: distance to the farthest vertex.
    pub fn radius(&self, x: Point) -> f64 {
        self.distances_from(x)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn distance(&self, p: Point, q: Point) -> f64 {
        if visible(&self.pts, p, q) {
            return p.dist(q);
        }
        let n = self.pts.len();
        let vp = self.visible_from(p);
        let vq = self.visible_from(q);
        let mut best = f64::INFINITY;
        for &u in &vp {
            for &w in &vq {
                let c = p.dist(self.pts[u]) + self.dist[u * n + w] + self.pts[w].dist(q);
                best = best.min(c);
            }
        }
        best
    }
}

pub fn brute_geodesic_distance(poly: &Polygon, p: Point, q: Point) -> f64 {
    VisibilityGraph::new(poly).distance(p, q)
}

/// Minimum of a convex function on `[lo, hi]`.
pub fn golden_min(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    let mut best = (0.5 * (lo + hi), f(0.5 * (lo + hi)));
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Golden-section search for the constrained center on `seg`; returns
/// `(t, radius)`.
pub fn brute_constrained_center(graph: &VisibilityGraph, seg: &Segment) -> (f64, f64) {
    let (t, _) = golden_min(0.0, 1.0, 1e-10, |t| graph.radius(seg.at(t)));
    // Endpoints are not probed by the search itself.
    [
        (t, graph.radius(seg.at(t))),
        (0.0, graph.radius(seg.a)),
        (1.0, graph.radius(seg.b)),
    ]
    .into_iter()
    .min_by(|a, b| a.1.total_cmp(&b.1))
    .unwrap()
}

/// The convex piece of `P` inside the box `c +- hh` that contains `c`, or
/// `None` when a vertex lies in the open box.
fn local_piece(v: &[Point], c: Point, hh: f64) -> Option<Vec<Point>> {
    let (lo, hi) = (c - Point::new(hh, hh), c + Point::new(hh, hh));
    if v.iter()
        .any(|p| p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y)
    {
        return None;
    }
    let mut piece = vec![lo, Point::new(hi.x, lo.y), hi, Point::new(lo.x, hi.y)];
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        let d = b - a;
        let side = d.cross(c - a);
        let sign = if side >= 0.0 { 1.0 } else { -1.0 };
        // Keep the side of the edge line holding c; lines missing the box
        // leave it unchanged.
        let f = |p: Point| sign * d.cross(p - a);
        let mut out = Vec::with_capacity(piece.len() + 1);
        for k in 0..piece.len() {
            let (p, q) = (piece[k], piece[(k + 1) % piece.len()]);
            let (fp, fq) = (f(p), f(q));
            if fp >= 0.0 {
                out.push(p);
            }
            if (fp >= 0.0) != (fq >= 0.0) {
                out.push(p.lerp(q, fp / (fp - fq)));
            }
        }
        // Only edges that actually cross the box cut it.
        let crosses = {
            let t_hit = |p: Point, q: Point| {
                let o1 = d.cross(p - a);
                let o2 = d.cross(q - a);
                o1 * o2 <= 0.0 && {
                    let e = q - p;
                    let o3 = e.cross(a - p);
                    let o4 = e.cross(b - p);
                    o3 * o4 <= 0.0
                }
            };
            let bx = [lo, Point::new(hi.x, lo.y), hi, Point::new(lo.x, hi.y)];
            (0..4).any(|k| t_hit(bx[k], bx[(k + 1) % 4]))
        };
        if crosses {
            piece = out;
        }
        if piece.len() < 3 {
            return None;
        }
    }
    Some(piece)
}

/// Vertical extent of a convex polygon at abscissa `x`.
fn section(piece: &[Point], x: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..piece.len() {
        let (p, q) = (piece[k], piece[(k + 1) % piece.len()]);
        if (p.x - x) * (q.x - x) <= 0.0 {
            if p.x == q.x {
                lo = lo.min(p.y.min(q.y));
                hi = hi.max(p.y.max(q.y));
            } else {
                let y = p.y + (x - p.x) / (q.x - p.x) * (q.y - p.y);
                lo = lo.min(y);
                hi = hi.max(y);
            }
        }
    }
    (lo, hi)
}

fn nested_min(piece: &[Point], tol: f64, g: &impl Fn(Point) -> f64) -> (Point, f64) {
    let (xl, xr) = piece
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, r), p| {
            (l.min(p.x), r.max(p.x))
        });
    let inner = |x: f64| {
        let (lo, hi) = section(piece, x);
        if lo > hi {
            return (lo, f64::INFINITY);
        }
        golden_min(lo, hi, tol, |y| g(Point::new(x, y)))
    };
    let (x, _) = golden_min(xl, xr, tol, |x| inner(x).1);
    let (y, val) = inner(x);
    (Point::new(x, y), val)
}

/// Geodesic center by grid search followed by nested golden-section search
/// over a convex piece of the polygon: a box around the current point, free
/// of vertices and cut by the edges crossing it. The radius function is
/// convex on any such piece, and a local minimum is global, so the box is
/// re-centred until the optimum is off the box sides.
pub fn brute_center(graph: &VisibilityGraph, grid_k: usize, refine_iters: usize) -> (Point, f64) {
    let v = &graph.pts;
    let (mut lo, mut hi) = (v[0], v[0]);
    for p in v {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let scale = (hi.x - lo.x).max(hi.y - lo.y);
    let k = grid_k.max(2);
    let mut best: Option<(Point, f64)> = None;
    let consider = |p: Point, best: &mut Option<(Point, f64)>| {
        let r = graph.radius(p);
        if best.map_or(true, |b| r < b.1) {
            *best = Some((p, r));
        }
    };
    for i in 0..k {
        for j in 0..k {
            let p = Point::new(
                lo.x + (hi.x - lo.x) * (i as f64 + 0.5) / k as f64,
                lo.y + (hi.y - lo.y) * (j as f64 + 0.5) / k as f64,
            );
            if graph.contains(p) {
                consider(p, &mut best);
            }
        }
    }
    // Vertices too: thin polygons can dodge the grid, and no box around a
    // vertex is free of it.
    for &p in v {
        consider(p, &mut best);
    }
    let (mut c, mut r) = best.expect("polygon has vertices");
    let tol = 1e-10 * scale;
    let mut h = scale / k as f64;
    let mut settled = false;
    for _ in 0..refine_iters.max(1) {
        let mut hh = 2.0 * h;
        let piece = loop {
            // Boxes this small mean a reflex vertex is in the way.
            if hh <= 1e-4 * scale {
                break None;
            }
            if let Some(p) = local_piece(v, c, hh) {
                break Some(p);
            }
            hh *= 0.5;
        };
        let Some(piece) = piece else { break };
        let (p, val) = nested_min(&piece, tol, &|q| graph.radius(q));
        let c0 = c;
        if val <= r {
            c = p;
            r = val;
        }
        // Done unless the optimum sits on a side of the box itself.
        let margin = 1e-3 * hh;
        if (p.x - c0.x).abs() < hh - margin && (p.y - c0.y).abs() < hh - margin {
            settled = true;
            break;
        }
        h = hh;
    }
    if !settled {
        (c, r) = triangle_walk(graph, c, r, tol);
    }
    (c, r)
}

/// Ear clipping, quadratic per ear in the worst case.
fn triangulate(v: &[Point]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    let mut out = Vec::with_capacity(v.len().saturating_sub(2));
    let mut guard = 0;
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let (a, b, c) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            if orient(v[a], v[b], v[c]) <= 0 {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                j != a
                    && j != b
                    && j != c
                    && orient(v[a], v[b], v[j]) >= 0
                    && orient(v[b], v[c], v[j]) >= 0
                    && orient(v[c], v[a], v[j]) >= 0
            });
            if !blocked {
                out.push([a, b, c]);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        guard += 1;
        if !clipped || guard > 4 * v.len() {
            break;
        }
    }
    if idx.len() == 3 {
        out.push([idx[0], idx[1], idx[2]]);
    }
    out
}

fn dist_to_triangle(t: [Point; 3], p: Point) -> f64 {
    let inside = (0..3).all(|k| orient(t[k], t[(k + 1) % 3], p) >= 0);
    if inside {
        return 0.0;
    }
    (0..3)
        .map(|k| {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let d = b - a;
            let s = ((p - a).dot(d) / d.norm2()).clamp(0.0, 1.0);
            p.dist(a + d * s)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Minimizes over every triangle touching the incumbent until none is left.
/// The radius is convex along segments in the polygon, so a point that is
/// optimal on all triangles around it is the center.
fn triangle_walk(graph: &VisibilityGraph, mut c: Point, mut r: f64, tol: f64) -> (Point, f64) {
    let v = &graph.pts;
    let tris: Vec<[Point; 3]> = triangulate(v)
        .into_iter()
        .map(|[a, b, c]| [v[a], v[b], v[c]])
        .collect();
    let mut done = vec![false; tris.len()];
    let reach = 1e3 * tol;
    loop {
        let todo: Vec<usize> = (0..tris.len())
            .filter(|&i| !done[i] && dist_to_triangle(tris[i], c) <= reach)
            .collect();
        if todo.is_empty() {
            return (c, r);
        }
        for i in todo {
            done[i] = true;
            let (p, val) = nested_min(&tris[i], tol, &|q| graph.radius(q));
            if val < r {
                (c, r) = (p, val);
            }
        }
    }
}

fn circles_value(circles: &[CircleConstraint], x: Point) -> f64 {
    circles
        .iter()
        .map(|c| c.value(x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Point where three circle constraints take equal values, by damped Newton.
fn equal_point(c: [&CircleConstraint; 3]) -> Option<Point> {
    let mut x = (c[0].anchor + c[1].anchor + c[2].anchor) * (1.0 / 3.0);
    let resid = |x: Point| (c[0].value(x) - c[1].value(x), c[0].value(x) - c[2].value(x));
    let unit = |x: Point, q: Point| (x - q).normalized().unwrap_or_default();
    for _ in 0..100 {
        let (r1, r2) = resid(x);
        if r1.abs().max(r2.abs()) < 1e-13 {
            return Some(x);
        }
        let (u0, u1, u2) = (
            unit(x, c[0].anchor),
            unit(x, c[1].anchor),
            unit(x, c[2].anchor),
        );
        let (a, b) = (u0 - u1, u0 - u2);
        let det = a.cross(b);
        if det.abs() < 1e-300 {
            return None;
        }
        // Solve [a; b] dx = -[r1; r2].
        let dx = Point::new(-(r1 * b.y - r2 * a.y) / det, -(a.x * r2 - b.x * r1) / det);
        let base = r1.abs() + r2.abs();
        let mut step = 1.0;
        loop {
            let cand = x + dx * step;
            let (s1, s2) = resid(cand);
            if s1.abs() + s2.abs() < base || step < 1e-6 {
                x = cand;
                break;
            }
            step *= 0.5;
        }
    }
    let (r1, r2) = resid(x);
    (r1.abs().max(r2.abs()) < 1e-9).then_some(x)
}

/// Minimum of `max_i |x - q_i| + f_i` over the plane by support-set
/// enumeration.
pub fn brute_min_circle_of_circles(circles: &[CircleConstraint]) -> (Point, f64) {
    let m = circles.len();
    let mut cands: Vec<Point> = circles.iter().map(|c| c.anchor).collect();
    for i in 0..m {
        for j in (i + 1)..m {
            let (ci, cj) = (&circles[i], &circles[j]);
            let d = ci.anchor.dist(cj.anchor);
            let t = 0.5 * (d + cj.offset - ci.offset);
            if d > 0.0 && t > 0.0 && t < d {
                cands.push(ci.anchor.lerp(cj.anchor, t / d));
            }
            for k in (j + 1)..m {
                if let Some(p) = equal_point([ci, cj, &circles[k]]) {
                    cands.push(p);
                }
            }
        }
    }
    cands
        .into_iter()
        .map(|p| (p, circles_value(circles, p)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one circle")
}

/// The same minimum by nested golden-section search over a box around the
/// anchors.
pub fn nested_min_circle_of_circles(circles: &[CircleConstraint]) -> (Point, f64) {
    let (mut lo, mut hi) = (circles[0].anchor, circles[0].anchor);
    for c in circles {
        lo = Point::new(lo.x.min(c.anchor.x), lo.y.min(c.anchor.y));
        hi = Point::new(hi.x.max(c.anchor.x), hi.y.max(c.anchor.y));
    }
    let pad = Point::new(1.0, 1.0) * (1e-9 + (hi.x - lo.x).max(hi.y - lo.y));
    let (lo, hi) = (lo - pad, hi + pad);
    let piece = [lo, Point::new(hi.x, lo.y), hi, Point::new(lo.x, hi.y)];
    nested_min(&piece, 1e-12, &|x| circles_value(circles, x))
}
