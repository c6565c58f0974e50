//! Shortest path trees as replayable streams.
//!
//! The reference provider triangulates the polygon once and runs the funnel
//! algorithm over the dual tree for every requested root. Its memory is
//! charged to the provider side of the meter; consumers only ever see a
//! one-pass iterator of tree edges in depth-first preorder.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{orient, CircleConstraint, DirectionCone, Point};
use crate::polygon::{ear_clip_triangulate, Polygon, Triangulation};
use crate::workspace::{Meter, ProviderCharge};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Parent {
    Root,
    Vertex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SptEdge {
    pub parent: Parent,
    pub parent_point: Point,
    pub child: usize,
    pub child_point: Point,
    /// Geodesic distance from the root to `child`.
    pub cum_dist: f64,
}

pub type EdgeStream<'a> = Box<dyn Iterator<Item = SptEdge> + 'a>;

/// Source of shortest path trees. Every call to [`SptProvider::stream`] is one
/// replay and must yield the same sequence for the same root.
pub trait SptProvider {
    fn polygon(&self) -> &Polygon;

    fn stream<'a>(&'a self, root: Point, meter: &'a Meter) -> Result<EdgeStream<'a>>;
}

/// Triangulate-and-funnel provider with O(n) internal words.
#[derive(Debug, Clone)]
pub struct FunnelProvider {
    poly: Polygon,
    tri: Triangulation,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Node {
    Root,
    V(usize),
}

impl FunnelProvider {
    pub fn new(poly: &Polygon) -> Self {
        Self {
            poly: poly.clone(),
            tri: ear_clip_triangulate(poly.vertices()),
        }
    }

    fn words(&self) -> usize {
        // Triangles and adjacency, plus per-root parent/dist/child arrays.
        6 * self.tri.triangles.len() + 6 * self.poly.len()
    }

    /// Triangle containing `p`; points within a relative `1e-9` of the
    /// boundary snap to the nearest triangle.
    fn locate(&self, p: Point) -> Option<usize> {
        let v = self.poly.vertices();
        let mut best: Option<(usize, f64)> = None;
        for (t, tri) in self.tri.triangles.iter().enumerate() {
            let (a, b, c) = (v[tri[0]], v[tri[1]], v[tri[2]]);
            if orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0 {
                return Some(t);
            }
            let out = [(a, b), (b, c), (c, a)]
                .iter()
                .map(|&(u, w)| {
                    let d = w - u;
                    let len = d.norm();
                    if len == 0.0 {
                        0.0
                    } else {
                        (-(d.cross(p - u)) / len).max(0.0)
                    }
                })
                .fold(0.0, f64::max);
            if best.map_or(true, |(_, o)| out < o) {
                best = Some((t, out));
            }
        }
        let tol = 1e-9 * self.poly.scale();
        best.filter(|&(_, o)| o <= tol).map(|(t, _)| t)
    }

    /// Parent and distance of every vertex for root `x`.
    fn solve(&self, x: Point) -> Result<(Vec<Parent>, Vec<f64>)> {
        let n = self.poly.len();
        let v = self.poly.vertices();
        let t0 = self
            .locate(x)
            .ok_or(Error::OutsidePolygon { x: x.x, y: x.y })?;
        let mut parent = vec![Parent::Root; n];
        let mut dist = vec![f64::NAN; n];
        let pt = |node: Node| match node {
            Node::Root => x,
            Node::V(i) => v[i],
        };
        let tri0 = self.tri.triangles[t0];
        let root_node = match tri0.iter().find(|&&c| v[c] == x) {
            Some(&c) => Node::V(c),
            None => Node::Root,
        };
        for &c in &tri0 {
            dist[c] = x.dist(v[c]);
            parent[c] = match root_node {
                Node::V(r) if r != c => Parent::Vertex(r),
                _ => Parent::Root,
            };
        }
        if let Node::V(r) = root_node {
            dist[r] = 0.0;
        }

        struct Job {
            tri: usize,
            left: usize,
            right: usize,
            funnel: Vec<Node>,
            apex: usize,
        }
        let mut stack = Vec::new();
        for k in 0..3 {
            if let Some(t2) = self.tri.neighbors[t0][k] {
                let u = tri0[(k + 1) % 3];
                let w = tri0[(k + 2) % 3];
                // Across u->w the neighbor sees w on its left and u on its right.
                let (funnel, apex) = match root_node {
                    Node::V(r) if r == w => (vec![Node::V(w), Node::V(u)], 0),
                    Node::V(r) if r == u => (vec![Node::V(w), Node::V(u)], 1),
                    _ => (vec![Node::V(w), root_node, Node::V(u)], 1),
                };
                stack.push(Job {
                    tri: t2,
                    left: w,
                    right: u,
                    funnel,
                    apex,
                });
            }
        }

        while let Some(job) = stack.pop() {
            let tri = self.tri.triangles[job.tri];
            let k = (0..3)
                .find(|&k| tri[k] != job.left && tri[k] != job.right)
                .expect("triangle has a third corner");
            let nv = tri[k];
            let p = v[nv];
            let d = &job.funnel;
            let ia = job.apex;
            let mut ix = ia;
            if let Some(i) = (0..ia).find(|&i| orient(pt(d[i + 1]), pt(d[i]), p) >= 0) {
                ix = i;
            } else if let Some(j) = ((ia + 1)..d.len())
                .rev()
                .find(|&j| orient(pt(d[j - 1]), pt(d[j]), p) <= 0)
            {
                ix = j;
            }
            if dist[nv].is_nan() {
                let via = d[ix];
                let base = match via {
                    Node::Root => 0.0,
                    Node::V(i) => dist[i],
                };
                dist[nv] = base + pt(via).dist(p);
                parent[nv] = match via {
                    Node::Root => Parent::Root,
                    Node::V(i) => Parent::Vertex(i),
                };
            }
            // Corner k is opposite edge (left,right); the other two edges are
            // opposite the left and right corners.
            let kl = (0..3).find(|&c| tri[c] == job.left).unwrap();
            let kr = (0..3).find(|&c| tri[c] == job.right).unwrap();
            if let Some(t2) = self.tri.neighbors[job.tri][kr] {
                // Edge nv -> left.
                let mut f = d[..=ix].to_vec();
                f.push(Node::V(nv));
                stack.push(Job {
                    tri: t2,
                    left: job.left,
                    right: nv,
                    funnel: f,
                    apex: ix.min(ia),
                });
            }
            if let Some(t2) = self.tri.neighbors[job.tri][kl] {
                // Edge right -> nv.
                let mut f = Vec::with_capacity(d.len() - ix + 1);
                f.push(Node::V(nv));
                f.extend_from_slice(&d[ix..]);
                stack.push(Job {
                    tri: t2,
                    left: nv,
                    right: job.right,
                    funnel: f,
                    apex: if ix <= ia { ia - ix + 1 } else { 1 },
                });
            }
        }
        debug_assert!(dist.iter().all(|d| d.is_finite()));
        Ok((parent, dist))
    }
}

impl SptProvider for FunnelProvider {
    fn polygon(&self) -> &Polygon {
        &self.poly
    }

    fn stream<'a>(&'a self, root: Point, meter: &'a Meter) -> Result<EdgeStream<'a>> {
        meter.count_replay();
        let charge = meter.charge_provider(self.words());
        let (parent, dist) = self.solve(root)?;
        let n = parent.len();
        // Children lists in increasing vertex order (counting sort).
        let mut start = vec![0usize; n + 2];
        for p in &parent {
            let slot = match p {
                Parent::Root => 0,
                Parent::Vertex(i) => i + 1,
            };
            start[slot + 1] += 1;
        }
        for i in 1..start.len() {
            start[i] += start[i - 1];
        }
        let mut fill = start.clone();
        let mut kids = vec![0usize; n];
        for (c, p) in parent.iter().enumerate() {
            let slot = match p {
                Parent::Root => 0,
                Parent::Vertex(i) => i + 1,
            };
            kids[fill[slot]] = c;
            fill[slot] += 1;
        }
        let mut stack: Vec<usize> = kids[start[0]..start[1]].iter().rev().copied().collect();
        let poly = &self.poly;
        let _charge = charge;
        let iter = std::iter::from_fn(move || {
            let _keep: &ProviderCharge<'_> = &_charge;
            let c = stack.pop()?;
            stack.extend(kids[start[c + 1]..start[c + 2]].iter().rev());
            meter.count_elements(1);
            let (pp, pp_point) = match parent[c] {
                Parent::Root => (Parent::Root, root),
                Parent::Vertex(i) => (Parent::Vertex(i), poly.vertex(i)),
            };
            Some(SptEdge {
                parent: pp,
                parent_point: pp_point,
                child: c,
                child_point: poly.vertex(c),
                cum_dist: dist[c],
            })
        });
        Ok(Box::new(iter))
    }
}

/// Geodesic distance from `p` to vertex `v`.
pub fn geodesic_distance_to_vertex(
    provider: &dyn SptProvider,
    p: Point,
    v: usize,
    meter: &Meter,
) -> Result<f64> {
    provider
        .stream(p, meter)?
        .find(|e| e.child == v)
        .map(|e| e.cum_dist)
        .ok_or(Error::Empty("vertex not in tree"))
}

/// Geodesic distance between two points of the polygon.
///
/// Extends the tree of `p` to `q` through the cheapest tree vertex visible
/// from `q`; `O(n)` visibility tests per vertex, meant for spot checks.
pub fn geodesic_distance(
    provider: &dyn SptProvider,
    p: Point,
    q: Point,
    meter: &Meter,
) -> Result<f64> {
    let poly = provider.polygon();
    let tol = 1e-9 * poly.scale();
    if !poly.contains(q, tol) {
        return Err(Error::OutsidePolygon { x: q.x, y: q.y });
    }
    if p == q {
        return Ok(0.0);
    }
    if poly.segment_inside(p, q) {
        return Ok(p.dist(q));
    }
    let mut best = f64::INFINITY;
    for e in provider.stream(p, meter)? {
        let cand = e.cum_dist + e.child_point.dist(q);
        if cand < best && poly.segment_inside(e.child_point, q) {
            best = cand;
        }
    }
    Ok(best)
}

/// Farthest distance and the cone of first-edge directions towards the
/// farthest vertices, in one pass with O(1) words.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarthestCone {
    pub distance: f64,
    pub cone: DirectionCone,
    /// Number of vertices within tolerance of `distance`.
    pub count: usize,
}

/// Farthest vertices with their first directions; the vertex list is for
/// reporting and tests, the pipeline uses [`farthest_cone`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarthestInfo {
    pub distance: f64,
    pub vertices: Vec<usize>,
    pub directions: Vec<Point>,
    pub cone: DirectionCone,
}

/// Tracks the root child and depth-2 ancestor of the current preorder node.
#[derive(Default)]
struct Ancestors {
    root_child: Option<(usize, Point)>,
    second: Option<Point>,
}

impl Ancestors {
    fn update(&mut self, e: &SptEdge) {
        match e.parent {
            Parent::Root => {
                self.root_child = Some((e.child, e.child_point));
                self.second = None;
            }
            Parent::Vertex(pv) => {
                if self.root_child.map(|(r, _)| r) == Some(pv) {
                    self.second = Some(e.child_point);
                }
            }
        }
    }

    /// Direction of the first segment of the path from `root`.
    fn first_direction(&self, root: Point, e: &SptEdge) -> Option<Point> {
        let (_, rp) = self.root_child?;
        let tiny = 1e-12 * (1.0 + root.norm());
        if rp.dist(root) > tiny {
            return (rp - root).normalized();
        }
        let target = if e.parent == Parent::Root {
            None
        } else {
            self.second
        };
        target.and_then(|q| (q - root).normalized())
    }
}

fn eps_for(poly: &Polygon, eps: f64) -> f64 {
    eps * poly.scale()
}

pub fn farthest_cone(
    provider: &dyn SptProvider,
    p: Point,
    eps: f64,
    meter: &Meter,
) -> Result<FarthestCone> {
    let _w = meter.charge(12)?;
    let tol = eps_for(provider.polygon(), eps);
    let mut anc = Ancestors::default();
    let mut best = f64::NEG_INFINITY;
    let mut cone = DirectionCone::empty();
    let mut count = 0;
    for e in provider.stream(p, meter)? {
        anc.update(&e);
        if e.cum_dist > best + tol {
            best = e.cum_dist;
            cone = DirectionCone::empty();
            count = 0;
        }
        if e.cum_dist >= best - tol {
            best = best.max(e.cum_dist);
            count += 1;
            if let Some(d) = anc.first_direction(p, &e) {
                cone.insert(d);
            }
        }
    }
    if count == 0 {
        return Err(Error::Empty("shortest path tree"));
    }
    Ok(FarthestCone {
        distance: best,
        cone,
        count,
    })
}

pub fn farthest_neighbors(
    provider: &dyn SptProvider,
    p: Point,
    eps: f64,
    meter: &Meter,
) -> Result<FarthestInfo> {
    let tol = eps_for(provider.polygon(), eps);
    let mut anc = Ancestors::default();
    let mut all = Vec::new();
    for e in provider.stream(p, meter)? {
        anc.update(&e);
        all.push((e.child, e.cum_dist, anc.first_direction(p, &e)));
    }
    let distance = all.iter().map(|a| a.1).fold(f64::NEG_INFINITY, f64::max);
    let mut info = FarthestInfo {
        distance,
        vertices: Vec::new(),
        directions: Vec::new(),
        cone: DirectionCone::empty(),
    };
    for (v, d, dir) in all {
        if d >= distance - tol {
            info.vertices.push(v);
            if let Some(dir) = dir {
                info.directions.push(dir);
                info.cone.insert(dir);
            }
        }
    }
    info.vertices.sort_unstable();
    Ok(info)
}

/// A root child `r` of the tree and its constraint `C(r, f_r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootCircle {
    pub vertex: usize,
    pub circle: CircleConstraint,
}

/// Root-child circles of the tree at `x`, in tree order.
pub fn root_child_circles<'a>(
    provider: &'a dyn SptProvider,
    x: Point,
    meter: &'a Meter,
) -> Result<impl Iterator<Item = RootCircle> + 'a> {
    let mut edges = provider.stream(x, meter)?.peekable();
    // Current root child: (vertex, anchor, cum at anchor, max cum in subtree).
    let mut cur: Option<(usize, Point, f64, f64)> = None;
    Ok(std::iter::from_fn(move || loop {
        match edges.next() {
            Some(e) if e.parent == Parent::Root => {
                let done = cur.take();
                cur = Some((e.child, e.child_point, e.cum_dist, e.cum_dist));
                if let Some(c) = done {
                    return Some(finish(c));
                }
            }
            Some(e) => {
                if let Some(c) = cur.as_mut() {
                    c.3 = c.3.max(e.cum_dist);
                }
            }
            None => return cur.take().map(finish),
        }
    }))
}

fn finish((vertex, anchor, base, max): (usize, Point, f64, f64)) -> RootCircle {
    RootCircle {
        vertex,
        circle: CircleConstraint {
            anchor,
            offset: (max - base).max(0.0),
        },
    }
}

/// `g(x) = max_i (|x - q_i| + f_i)` over the root-child circles of `x`, which
/// equals the geodesic radius at `x`.
pub fn geodesic_radius(provider: &dyn SptProvider, x: Point, meter: &Meter) -> Result<f64> {
    Ok(provider
        .stream(x, meter)?
        .map(|e| e.cum_dist)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Order-sensitive hash of the root-child vertex sequence at `x`.
pub fn circle_fingerprint(provider: &dyn SptProvider, x: Point, meter: &Meter) -> Result<u64> {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    for rc in root_child_circles(provider, x, meter)? {
        rc.vertex.hash(&mut h);
    }
    Ok(h.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::fixtures::{l_shape, square};

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn edges(poly: &Polygon, root: Point) -> Vec<SptEdge> {
        let prov = FunnelProvider::new(poly);
        let m = Meter::unbounded(poly.len());
        prov.stream(root, &m).unwrap().collect()
    }

    #[test]
    fn convex_tree_is_a_star() {
        let sq = square();
        let es = edges(&sq, p(0.3, 0.6));
        assert_eq!(es.len(), 4);
        for e in &es {
            assert_eq!(e.parent, Parent::Root);
            assert!((e.cum_dist - p(0.3, 0.6).dist(e.child_point)).abs() < 1e-15);
        }
    }

    #[test]
    fn l_shape_bends_at_reflex_vertex() {
        let l = l_shape();
        let es = edges(&l, p(1.9, 0.9));
        let e = es.iter().find(|e| e.child == 5).unwrap();
        assert_eq!(e.parent, Parent::Vertex(3));
        let want = p(0.9, -0.1).norm() + 2f64.sqrt();
        assert!((e.cum_dist - want).abs() < 1e-12);
        assert!((want - 2.319753).abs() < 1e-6);
    }

    #[test]
    fn replay_is_identical_and_counted() {
        let l = l_shape();
        let prov = FunnelProvider::new(&l);
        let m = Meter::unbounded(6);
        let a: Vec<_> = prov.stream(p(0.5, 1.5), &m).unwrap().collect();
        let b: Vec<_> = prov.stream(p(0.5, 1.5), &m).unwrap().collect();
        assert_eq!(a, b);
        assert_eq!(m.spt_replays(), 2);
        assert!(m.report().peak_provider_words > 0);
        assert_eq!(m.report().peak_core_words, 0);
    }

    #[test]
    fn preorder_parents_first() {
        let l = l_shape();
        let es = edges(&l, p(1.9, 0.9));
        let mut seen = vec![false; l.len()];
        for e in &es {
            if let Parent::Vertex(v) = e.parent {
                assert!(seen[v]);
                let len = e.parent_point.dist(e.child_point);
                let pd = es.iter().find(|f| f.child == v).unwrap().cum_dist;
                assert!((e.cum_dist - pd - len).abs() < 1e-12);
            }
            assert!(!seen[e.child]);
            seen[e.child] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn point_distances() {
        let sq = square();
        let prov = FunnelProvider::new(&sq);
        let m = Meter::unbounded(4);
        let d = geodesic_distance(&prov, p(0.2, 0.2), p(0.9, 0.9), &m).unwrap();
        assert!((d - 0.989949).abs() < 1e-6);
        assert_eq!(
            geodesic_distance(&prov, p(0.2, 0.2), p(0.2, 0.2), &m).unwrap(),
            0.0
        );
        let l = l_shape();
        let prov = FunnelProvider::new(&l);
        let d = geodesic_distance(&prov, p(1.9, 0.9), p(0.0, 2.0), &m).unwrap();
        assert!((d - 2.319753).abs() < 1e-6);
        assert!(geodesic_distance(&prov, p(1.9, 0.9), p(1.5, 1.5), &m).is_err());
    }

    #[test]
    fn outside_root_is_rejected() {
        let l = l_shape();
        let prov = FunnelProvider::new(&l);
        let m = Meter::unbounded(6);
        assert!(matches!(
            prov.stream(p(1.5, 1.5), &m),
            Err(Error::OutsidePolygon { .. })
        ));
    }

    #[test]
    fn root_on_vertex_and_boundary() {
        let l = l_shape();
        let es = edges(&l, p(1.0, 1.0));
        let e3 = es.iter().find(|e| e.child == 3).unwrap();
        assert_eq!((e3.parent, e3.cum_dist), (Parent::Root, 0.0));
        for e in &es {
            let q = e.child_point;
            assert!((e.cum_dist - q.dist(p(1.0, 1.0))).abs() < 1e-12, "{e:?}");
        }
        let es = edges(&l, p(1.0, 0.0));
        let e5 = es.iter().find(|e| e.child == 5).unwrap();
        assert!((e5.cum_dist - 5f64.sqrt()).abs() < 1e-12);
        let e4 = es.iter().find(|e| e.child == 4).unwrap();
        assert!((e4.cum_dist - 2.0).abs() < 1e-12);
    }

    #[test]
    fn farthest_examples() {
        let sq = square();
        let prov = FunnelProvider::new(&sq);
        let m = Meter::unbounded(4);
        let f = farthest_neighbors(&prov, p(0.5, 0.5), 1e-9, &m).unwrap();
        assert_eq!(f.vertices, vec![0, 1, 2, 3]);
        assert!((f.distance - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(f.cone.full);

        let l = l_shape();
        let prov = FunnelProvider::new(&l);
        let f = farthest_neighbors(&prov, p(0.25, 0.25), 1e-9, &m).unwrap();
        assert_eq!(f.vertices, vec![2, 4]);
        assert!((f.distance - 3.625f64.sqrt()).abs() < 1e-12);
        let c = farthest_cone(&prov, p(0.25, 0.25), 1e-9, &m).unwrap();
        assert_eq!(c.count, 2);
        assert_eq!(c.distance, f.distance);
        assert!(!c.cone.full);
    }

    #[test]
    fn circles_on_l_shape() {
        let l = l_shape();
        let prov = FunnelProvider::new(&l);
        let m = Meter::unbounded(6);
        let x = p(1.9, 0.9);
        let cs: Vec<_> = root_child_circles(&prov, x, &m).unwrap().collect();
        // Vertex 4 hides behind the reflex vertex 3.
        assert_eq!(cs.len(), 4);
        for c in &cs {
            let want = if c.vertex == 3 { 2f64.sqrt() } else { 0.0 };
            assert!((c.circle.offset - want).abs() < 1e-12, "{c:?}");
        }
        let g = cs
            .iter()
            .map(|c| c.circle.value(x))
            .fold(f64::MIN, f64::max);
        let f = farthest_cone(&prov, x, 1e-9, &m).unwrap();
        assert!((g - f.distance).abs() < 1e-12);
    }
}
