//! Implicit sub-polygons bounded by vertical chords.
//!
//! A region is never stored as a vertex list. It is the part of the input
//! polygon cut off by a handful of non-crossing vertical chords ("walls"),
//! and its boundary is regenerated by walking the input boundary and jumping
//! across walls. All chord computations happen in a sheared frame where
//! vertex abscissas are pairwise distinct.

use serde::Serialize;

use super::Polygon;
use crate::error::{Error, Result};
use crate::geom::{orient, Point, Segment, Side};
use crate::workspace::Meter;

/// Regions with at most this many vertices are materialized and triangulated.
pub const SMALL_REGION: usize = 12;

/// Words charged per candidate in a ray-shooting batch.
const WORDS_PER_CANDIDATE: usize = 8;

/// `x' = x + delta * y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shear {
    pub delta: f64,
}

impl Shear {
    pub const IDENTITY: Shear = Shear { delta: 0.0 };

    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        Point::new(p.x + self.delta * p.y, p.y)
    }

    #[inline]
    pub fn invert(&self, p: Point) -> Point {
        Point::new(p.x - self.delta * p.y, p.y)
    }
}

fn abscissas_distinct(poly: &Polygon, shear: Shear) -> bool {
    let mut xs: Vec<f64> = poly.vertices().iter().map(|&p| shear.apply(p).x).collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.windows(2).all(|w| w[0] < w[1])
}

/// Smallest-effort shear making all vertex abscissas distinct. The identity
/// is returned when they already are.
pub fn choose_shear(poly: &Polygon) -> Shear {
    if abscissas_distinct(poly, Shear::IDENTITY) {
        return Shear::IDENTITY;
    }
    let v = poly.vertices();
    let mut ratio = f64::INFINITY;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            let dx = (v[i].x - v[j].x).abs();
            let dy = (v[i].y - v[j].y).abs();
            if dx > 0.0 && dy > 0.0 {
                ratio = ratio.min(dx / dy);
            }
        }
    }
    let mut delta = if ratio.is_finite() { 0.5 * ratio } else { 0.5 };
    for _ in 0..16 {
        let s = Shear { delta };
        if abscissas_distinct(poly, s) {
            return s;
        }
        delta *= 0.37;
    }
    Shear { delta }
}

/// A position on the input boundary: edge `edge` at fraction `param`.
/// Vertices have `param == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPos {
    pub edge: usize,
    pub param: f64,
}

impl BoundaryPos {
    pub fn vertex(i: usize) -> Self {
        Self {
            edge: i,
            param: 0.0,
        }
    }

    pub fn point(&self, poly: &Polygon) -> Point {
        let (a, b) = poly.edge(self.edge);
        if self.param == 0.0 {
            a
        } else {
            a.lerp(b, self.param)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerticalChord {
    /// Abscissa in the sheared frame.
    pub x: f64,
    /// Sheared endpoints.
    pub lower: Point,
    pub upper: Point,
    pub lower_pos: BoundaryPos,
    pub upper_pos: BoundaryPos,
    pub through_vertex: Option<usize>,
}

impl VerticalChord {
    /// The chord in original coordinates, directed from lower to upper.
    pub fn segment(&self, shear: Shear) -> Segment {
        Segment {
            a: shear.invert(self.lower),
            b: shear.invert(self.upper),
        }
    }
}

/// A chord bounding a region; the region boundary runs along it from
/// `from` to `to`, keeping the region on its left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Wall {
    pub chord: VerticalChord,
    pub side: Side,
    pub from: BoundaryPos,
    pub to: BoundaryPos,
}

impl Wall {
    /// Keep the part of the region on `side` of `chord` (Left = smaller x').
    pub fn new(chord: VerticalChord, side: Side) -> Self {
        let (from, to) = match side {
            Side::Left => (chord.lower_pos, chord.upper_pos),
            Side::Right => (chord.upper_pos, chord.lower_pos),
        };
        Self {
            chord,
            side,
            from,
            to,
        }
    }
}

/// An implicit sub-polygon: the input boundary with wall shortcuts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryRun {
    pub shear: Shear,
    pub walls: Vec<Wall>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RegionVertex {
    /// An input vertex.
    Vertex(usize),
    /// A wall endpoint in the interior of an input edge.
    WallEnd(BoundaryPos),
}

impl RegionVertex {
    fn at(pos: BoundaryPos) -> Self {
        if pos.param == 0.0 {
            RegionVertex::Vertex(pos.edge)
        } else {
            RegionVertex::WallEnd(pos)
        }
    }

    /// Input edge that leaves this vertex along the boundary.
    pub fn edge(&self) -> usize {
        match *self {
            RegionVertex::Vertex(i) => i,
            RegionVertex::WallEnd(p) => p.edge,
        }
    }

    pub fn point(&self, poly: &Polygon) -> Point {
        match *self {
            RegionVertex::Vertex(i) => poly.vertex(i),
            RegionVertex::WallEnd(p) => p.point(poly),
        }
    }
}

impl BoundaryRun {
    pub fn whole(shear: Shear) -> Self {
        Self {
            shear,
            walls: Vec::new(),
        }
    }

    /// Words needed to keep this region alive.
    pub fn words(&self) -> usize {
        1 + 12 * self.walls.len()
    }

    /// Walk the region boundary counter-clockwise, one pass over the input.
    /// Also reports which walls were crossed.
    fn walk_marked(
        &self,
        poly: &Polygon,
        meter: &Meter,
        mut f: impl FnMut(usize, RegionVertex, Point),
        mut crossed: impl FnMut(usize),
    ) {
        let n = poly.len();
        let mut idx = 0usize;
        let mut emit = |rv: RegionVertex| {
            meter.count_elements(1);
            let p = self.shear.apply(rv.point(poly));
            f(idx, rv, p);
            idx += 1;
        };
        if self.walls.is_empty() {
            for i in 0..n {
                emit(RegionVertex::Vertex(i));
            }
            return;
        }
        let mut pos = self.walls[0].to;
        emit(RegionVertex::at(pos));
        let max_steps = 2 * n + 4 * self.walls.len() + 8;
        for _ in 0..max_steps {
            let mut best: Option<(usize, f64)> = None;
            for (wi, w) in self.walls.iter().enumerate() {
                if w.from.edge == pos.edge
                    && w.from.param >= pos.param
                    && best.map_or(true, |(_, bp)| w.from.param < bp)
                {
                    best = Some((wi, w.from.param));
                }
            }
            if let Some((wi, _)) = best {
                let w = &self.walls[wi];
                if w.from != pos {
                    emit(RegionVertex::at(w.from));
                }
                if wi == 0 {
                    return;
                }
                crossed(wi);
                pos = w.to;
                emit(RegionVertex::at(pos));
                continue;
            }
            pos = BoundaryPos::vertex(poly.next(pos.edge));
            emit(RegionVertex::Vertex(pos.edge));
        }
        debug_assert!(false, "region walk did not close");
    }

    /// Calls `f(index, vertex, sheared_point)` for each region vertex.
    pub fn walk(&self, poly: &Polygon, meter: &Meter, f: impl FnMut(usize, RegionVertex, Point)) {
        self.walk_marked(poly, meter, f, |_| {});
    }

    /// First and last input vertex met along the region boundary.
    pub fn run(&self, poly: &Polygon, meter: &Meter) -> Option<(usize, usize)> {
        let mut first = None;
        let mut last = None;
        self.walk(poly, meter, |_, rv, _| {
            if let RegionVertex::Vertex(i) = rv {
                first.get_or_insert(i);
                last = Some(i);
            }
        });
        first.zip(last)
    }
}

pub fn region_vertex_count(poly: &Polygon, run: &BoundaryRun, meter: &Meter) -> usize {
    let mut m = 0;
    run.walk(poly, meter, |_, _, _| m += 1);
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayHit {
    pub y: f64,
    pub pos: BoundaryPos,
    /// Index of the region edge (by its starting vertex in walk order).
    pub region_edge: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct RayHits {
    pub above: Option<RayHit>,
    pub below: Option<RayHit>,
}

/// Nearest region-boundary crossings straight above and below each query
/// point (sheared frame), for all queries in one pass.
pub fn vertical_ray_hits_batch(
    poly: &Polygon,
    run: &BoundaryRun,
    queries: &[Point],
    meter: &Meter,
) -> Result<Vec<RayHits>> {
    let _words = meter.charge(WORDS_PER_CANDIDATE * queries.len())?;
    let mut out = vec![RayHits::default(); queries.len()];
    let mut first: Option<(RegionVertex, Point)> = None;
    let mut prev: Option<(usize, RegionVertex, Point)> = None;
    let visit = |k: usize, a_rv: RegionVertex, a: Point, b: Point, out: &mut [RayHits]| {
        let (lo, hi) = if a.x < b.x { (a, b) } else { (b, a) };
        if !(lo.x < hi.x) {
            return;
        }
        let e = a_rv.edge();
        let (ea, eb) = poly.edge(e);
        let (ea, eb) = (run.shear.apply(ea), run.shear.apply(eb));
        for (q, h) in queries.iter().zip(out.iter_mut()) {
            if !(lo.x < q.x && q.x < hi.x) {
                continue;
            }
            let t = (q.x - a.x) / (b.x - a.x);
            let y = a.y + t * (b.y - a.y);
            let param = (q.x - ea.x) / (eb.x - ea.x);
            let hit = RayHit {
                y,
                pos: BoundaryPos { edge: e, param },
                region_edge: k,
            };
            if y > q.y {
                if h.above.map_or(true, |o| y < o.y) {
                    h.above = Some(hit);
                }
            } else if y < q.y && h.below.map_or(true, |o| y > o.y) {
                h.below = Some(hit);
            }
        }
    };
    run.walk(poly, meter, |k, rv, p| {
        if let Some((pk, prv, pp)) = prev {
            visit(pk, prv, pp, p, &mut out);
        } else {
            first = Some((rv, p));
        }
        prev = Some((k, rv, p));
    });
    if let (Some((pk, prv, pp)), Some((_, fp))) = (prev, first) {
        visit(pk, prv, pp, fp, &mut out);
    }
    Ok(out)
}

impl VerticalChord {
    /// The vertical chord through an interior point (sheared frame).
    pub fn through_point(
        poly: &Polygon,
        run: &BoundaryRun,
        q: Point,
        meter: &Meter,
    ) -> Option<Self> {
        let hits = vertical_ray_hits_batch(poly, run, &[q], meter).ok()?;
        let (lo, hi) = (hits[0].below?, hits[0].above?);
        Some(Self {
            x: q.x,
            lower: Point::new(q.x, lo.y),
            upper: Point::new(q.x, hi.y),
            lower_pos: lo.pos,
            upper_pos: hi.pos,
            through_vertex: None,
        })
    }
}

/// `d` points strictly into the interior angle at `v` (neighbors `u`, `w`,
/// counter-clockwise order `u, v, w`).
fn direction_inside(u: Point, v: Point, w: Point, d: Point) -> bool {
    let e1 = w - v;
    let e2 = u - v;
    let along = |e: Point| e.cross(d) == 0.0 && e.dot(d) > 0.0;
    if along(e1) || along(e2) {
        return false;
    }
    if orient(u, v, w) > 0 {
        e1.cross(d) > 0.0 && d.cross(e2) > 0.0
    } else {
        !(e2.cross(d) >= 0.0 && d.cross(e1) >= 0.0)
    }
}

/// A balanced chord together with the resulting piece sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordSplit {
    pub chord: VerticalChord,
    pub region_vertices: usize,
    pub left_count: usize,
    pub right_count: usize,
}

impl ChordSplit {
    pub fn max_side(&self) -> usize {
        self.left_count.max(self.right_count)
    }

    /// `ceil(2m/3) + 2`.
    pub fn bound(m: usize) -> usize {
        (2 * m).div_ceil(3) + 2
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    index: usize,
    vertex: usize,
    point: Point,
    up: bool,
    down: bool,
}

/// Find a vertex-anchored vertical chord splitting the region into two
/// pieces of at most `ceil(2m/3) + 2` vertices each.
///
/// Candidates are processed in batches of `s`; each batch costs two passes
/// over the region boundary.
pub fn balanced_vertical_chord(
    poly: &Polygon,
    run: &BoundaryRun,
    meter: &Meter,
) -> Result<ChordSplit> {
    let m = region_vertex_count(poly, run, meter);
    let batch = meter.s().max(1);
    let _words = meter.charge(8)?;
    let mut best: Option<ChordSplit> = None;

    let mut start = 0;
    while start < m {
        let end = (start + batch).min(m);
        let cands = collect_candidates(poly, run, meter, start, end)?;
        if !cands.is_empty() {
            let queries: Vec<Point> = cands.iter().map(|c| c.point).collect();
            let hits = vertical_ray_hits_batch(poly, run, &queries, meter)?;
            for (c, h) in cands.iter().zip(&hits) {
                for (up, hit) in [(true, h.above), (false, h.below)] {
                    let (valid, Some(hit)) = (if up { c.up } else { c.down }, hit) else {
                        continue;
                    };
                    if !valid {
                        continue;
                    }
                    // Piece from the vertex forward to the hit edge, plus the hit point.
                    let forward = (hit.region_edge + m - c.index) % m + 2;
                    let back = m + 3 - forward;
                    let (left_count, right_count) =
                        if up { (back, forward) } else { (forward, back) };
                    let vpos = BoundaryPos::vertex(c.vertex);
                    let hp = Point::new(c.point.x, hit.y);
                    let chord = if up {
                        VerticalChord {
                            x: c.point.x,
                            lower: c.point,
                            upper: hp,
                            lower_pos: vpos,
                            upper_pos: hit.pos,
                            through_vertex: Some(c.vertex),
                        }
                    } else {
                        VerticalChord {
                            x: c.point.x,
                            lower: hp,
                            upper: c.point,
                            lower_pos: hit.pos,
                            upper_pos: vpos,
                            through_vertex: Some(c.vertex),
                        }
                    };
                    let split = ChordSplit {
                        chord,
                        region_vertices: m,
                        left_count,
                        right_count,
                    };
                    if best.map_or(true, |b| split.max_side() < b.max_side()) {
                        best = Some(split);
                    }
                }
            }
        }
        start = end;
    }
    match best {
        Some(b) if b.max_side() <= ChordSplit::bound(m) => Ok(b),
        _ => Err(Error::NoBalancedChord(m)),
    }
}

fn collect_candidates(
    poly: &Polygon,
    run: &BoundaryRun,
    meter: &Meter,
    start: usize,
    end: usize,
) -> Result<Vec<Candidate>> {
    let _words = meter.charge(WORDS_PER_CANDIDATE * (end - start))?;
    let mut out = Vec::with_capacity(end - start);
    let mut head: [Option<(RegionVertex, Point)>; 2] = [None, None];
    let mut window: [Option<(usize, RegionVertex, Point)>; 2] = [None, None];
    let consider =
        |idx: usize, rv: RegionVertex, u: Point, v: Point, w: Point, out: &mut Vec<Candidate>| {
            if idx < start || idx >= end {
                return;
            }
            if let RegionVertex::Vertex(i) = rv {
                let up = direction_inside(u, v, w, Point::new(0.0, 1.0));
                let down = direction_inside(u, v, w, Point::new(0.0, -1.0));
                if up || down {
                    out.push(Candidate {
                        index: idx,
                        vertex: i,
                        point: v,
                        up,
                        down,
                    });
                }
            }
        };
    run.walk(poly, meter, |k, rv, p| {
        if k < 2 {
            head[k] = Some((rv, p));
        }
        if let (Some((_, _, u)), Some((vk, vrv, v))) = (window[0], window[1]) {
            consider(vk, vrv, u, v, p, &mut out);
        }
        window[0] = window[1];
        window[1] = Some((k, rv, p));
    });
    // Close the cycle: the last vertex and the first one.
    if let (Some((_, _, u)), Some((lk, lrv, l)), Some((frv, f)), Some((_, s))) =
        (window[0], window[1], head[0], head[1])
    {
        consider(lk, lrv, u, l, f, &mut out);
        consider(0, frv, l, f, s, &mut out);
    }
    out.sort_by_key(|c| c.index);
    Ok(out)
}

/// Keep the part of `run` on `side` of `chord`.
pub fn split_region(
    poly: &Polygon,
    run: &BoundaryRun,
    chord: &VerticalChord,
    side: Side,
    meter: &Meter,
) -> Result<BoundaryRun> {
    let wall = Wall::new(*chord, side);
    let mut probe = BoundaryRun {
        shear: run.shear,
        walls: Vec::with_capacity(run.walls.len() + 1),
    };
    probe.walls.push(wall);
    probe.walls.extend(run.walls.iter().copied());
    let _words = meter.charge(probe.words())?;
    let mut keep = vec![false; probe.walls.len()];
    keep[0] = true;
    probe.walk_marked(poly, meter, |_, _, _| {}, |wi| keep[wi] = true);
    let walls = probe
        .walls
        .iter()
        .zip(&keep)
        .filter_map(|(w, &k)| k.then_some(*w))
        .collect();
    Ok(BoundaryRun {
        shear: run.shear,
        walls,
    })
}

/// A constant-size region as an explicit polygon in original coordinates.
#[derive(Debug, Clone)]
pub struct MaterializedRegion {
    pub polygon: Polygon,
    pub vertices: Vec<RegionVertex>,
}

pub fn materialize_small_region(
    poly: &Polygon,
    run: &BoundaryRun,
    meter: &Meter,
) -> Result<MaterializedRegion> {
    let m = region_vertex_count(poly, run, meter);
    let _words = meter.charge(3 * m)?;
    let mut pts = Vec::with_capacity(m);
    let mut kinds = Vec::with_capacity(m);
    run.walk(poly, meter, |_, rv, _| {
        let p = rv.point(poly);
        if pts.last() != Some(&p) {
            pts.push(p);
            kinds.push(rv);
        }
    });
    if pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
        kinds.pop();
    }
    Ok(MaterializedRegion {
        polygon: Polygon::new_unchecked(pts),
        vertices: kinds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::fixtures::*;
    use crate::polygon::signed_area;

    fn meter() -> Meter {
        Meter::unbounded(64)
    }

    fn region_points(poly: &Polygon, run: &BoundaryRun) -> Vec<Point> {
        let m = meter();
        let mut v = Vec::new();
        run.walk(poly, &m, |_, rv, _| v.push(rv.point(poly)));
        v
    }

    #[test]
    fn ray_hits_square_and_l() {
        let m = meter();
        let sq = square();
        let whole = BoundaryRun::whole(Shear::IDENTITY);
        let h = vertical_ray_hits_batch(&sq, &whole, &[Point::new(0.5, 0.5)], &m).unwrap();
        assert_eq!(h[0].above.unwrap().y, 1.0);
        assert_eq!(h[0].below.unwrap().y, 0.0);

        let l = l_shape();
        let h = vertical_ray_hits_batch(
            &l,
            &whole,
            &[
                Point::new(1.5, 0.5),
                Point::new(0.5, 0.5),
                Point::new(3.0, 0.5),
            ],
            &m,
        )
        .unwrap();
        assert_eq!((h[0].below.unwrap().y, h[0].above.unwrap().y), (0.0, 1.0));
        assert_eq!((h[1].below.unwrap().y, h[1].above.unwrap().y), (0.0, 2.0));
        assert!(h[2].above.is_none() && h[2].below.is_none());
    }

    #[test]
    fn square_split_left() {
        let m = meter();
        let sq = square();
        let whole = BoundaryRun::whole(Shear::IDENTITY);
        let chord = VerticalChord::through_point(&sq, &whole, Point::new(0.5, 0.5), &m).unwrap();
        let left = split_region(&sq, &whole, &chord, Side::Left, &m).unwrap();
        let pts = region_points(&sq, &left);
        assert_eq!(
            pts,
            vec![
                Point::new(0.5, 1.0),
                Point::new(0.0, 1.0),
                Point::new(0.0, 0.0),
                Point::new(0.5, 0.0)
            ]
        );
        assert!((signed_area(&pts) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn l_split_at_reflex_vertex() {
        let m = meter();
        let l = l_shape();
        let whole = BoundaryRun::whole(Shear::IDENTITY);
        // Downward chord from the reflex vertex (1,1).
        let hits = vertical_ray_hits_batch(&l, &whole, &[Point::new(1.0, 1.0)], &m).unwrap();
        let below = hits[0].below.unwrap();
        let chord = VerticalChord {
            x: 1.0,
            lower: Point::new(1.0, below.y),
            upper: Point::new(1.0, 1.0),
            lower_pos: below.pos,
            upper_pos: BoundaryPos::vertex(3),
            through_vertex: Some(3),
        };
        let right = split_region(&l, &whole, &chord, Side::Right, &m).unwrap();
        assert_eq!(
            region_points(&l, &right),
            vec![
                Point::new(1.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(2.0, 1.0),
                Point::new(1.0, 1.0)
            ]
        );
        assert_eq!(right.run(&l, &m), Some((1, 3)));
        let left = split_region(&l, &whole, &chord, Side::Left, &m).unwrap();
        let lp = region_points(&l, &left);
        assert_eq!(lp.len(), 5);
        assert!((signed_area(&lp) - 2.0).abs() < 1e-15);
    }

    fn regular(k: usize) -> Polygon {
        let pts = (0..k)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / k as f64 + 0.1;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        Polygon::new(pts).unwrap()
    }

    /// Independent enumeration: for every vertex chord, piece sizes by
    /// explicit clipping of the vertex cycle.
    fn brute_best_split(poly: &Polygon) -> usize {
        let n = poly.len();
        let v = poly.vertices();
        let mut best = usize::MAX;
        for i in 0..n {
            let x = v[i].x;
            for dir in [1.0f64, -1.0] {
                // Nearest crossing in direction dir.
                let mut hit: Option<(f64, usize)> = None;
                for e in 0..n {
                    let (a, b) = poly.edge(e);
                    if (a.x - x) * (b.x - x) >= 0.0 {
                        continue;
                    }
                    let y = a.y + (x - a.x) / (b.x - a.x) * (b.y - a.y);
                    let d = (y - v[i].y) * dir;
                    if d > 0.0 && hit.map_or(true, |(hd, _)| d < hd) {
                        hit = Some((d, e));
                    }
                }
                let Some((_, e)) = hit else { continue };
                let mid = v[i] + Point::new(0.0, dir * 1e-9);
                if poly.locate(mid) != 1 {
                    continue;
                }
                let a = (e + n - i) % n + 2;
                let b = n + 3 - a;
                best = best.min(a.max(b));
            }
        }
        best
    }

    #[test]
    fn regular_12gon_balanced() {
        let p = regular(12);
        let m = meter();
        let whole = BoundaryRun::whole(choose_shear(&p));
        let split = balanced_vertical_chord(&p, &whole, &m).unwrap();
        assert!(split.max_side() <= 8, "{split:?}");
        assert_eq!(split.max_side(), brute_best_split(&p));
        assert_eq!(split.left_count + split.right_count, 12 + 3);
    }

    #[test]
    fn balanced_split_counts_match_walk() {
        let p = regular(30);
        let m = meter();
        let whole = BoundaryRun::whole(choose_shear(&p));
        let split = balanced_vertical_chord(&p, &whole, &m).unwrap();
        for (side, expect) in [
            (Side::Left, split.left_count),
            (Side::Right, split.right_count),
        ] {
            let r = split_region(&p, &whole, &split.chord, side, &m).unwrap();
            assert_eq!(region_vertex_count(&p, &r, &m), expect);
        }
    }

    #[test]
    fn small_batches_give_same_chord() {
        let p = regular(40);
        let whole = BoundaryRun::whole(choose_shear(&p));
        let a = balanced_vertical_chord(&p, &whole, &Meter::unbounded(40)).unwrap();
        let tiny = Meter::new(
            crate::workspace::WorkspaceBudget::new(3, crate::workspace::BudgetPolicy::Record),
            40,
        );
        let b = balanced_vertical_chord(&p, &whole, &tiny).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shear_breaks_ties() {
        let l = l_shape();
        let s = choose_shear(&l);
        assert!(s.delta > 0.0);
        assert!(abscissas_distinct(&l, s));
        let q = Point::new(0.3, 1.7);
        assert!(s.invert(s.apply(q)).dist(q) < 1e-15);
    }

    #[test]
    fn materialize_matches_walk() {
        let l = l_shape();
        let m = meter();
        let whole = BoundaryRun::whole(Shear::IDENTITY);
        let mat = materialize_small_region(&l, &whole, &m).unwrap();
        assert_eq!(mat.polygon.vertices(), l.vertices());
    }
}
