//! The unconstrained geodesic center.
//!
//! Balanced vertical chords shrink the search to a triangle whose sides are
//! chords of the polygon. Lines through shortest path tree edges are then
//! cut away in Megiddo-style rounds until the tree is combinatorially fixed
//! over the remaining convex region, where the radius is the upper envelope
//! of a fixed set of circles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chord_center::{
    constrained_geodesic_center, envelope_cone, minimize_on_segment, CircleSource,
    ConstrainedCenter, SolverConfig, TreeCircles, PRUNING_SAMPLES,
};
use crate::error::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::geom::{ccw_angle, DirectedLine, HalfPlane, Point, Rotation, Segment, Side};
use crate::polygon::{
    balanced_vertical_chord, choose_shear, ear_clip_triangulate, materialize_small_region,
    point_segment_dist, region_vertex_count, split_region, BoundaryRun, Polygon, Shear,
    VerticalChord, SMALL_REGION,
};
use crate::prune::{approx_median, DecisionTrace, LevelDecision, Window};
use crate::spt::{
    circle_fingerprint, farthest_cone, farthest_neighbors, geodesic_radius, FunnelProvider, Parent,
    SptProvider,
};
use crate::workspace::{Charge, Meter, WorkspaceBudget, WorkspaceReport};

/// Active lines at or below this count are cut one by one.
pub const LINE_BASE_CASE: usize = 24;

const HALFPLANE_WORDS: usize = 5;

/// Side of a directed segment on which the center lies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LineVerdict {
    CenterAt(Point),
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ChordVerdict {
    CenterAt(Point),
    Side(Side),
}

/// Closed wedge of `poly` at a boundary point, as a clockwise extreme and a
/// counter-clockwise span; `None` away from the boundary.
fn boundary_wedge(poly: &Polygon, p: Point, tol: f64) -> Option<(Point, f64)> {
    if let Some(i) = (0..poly.len()).find(|&i| poly.vertex(i).dist(p) <= tol) {
        let v = poly.vertex(i);
        let e1 = poly.vertex(poly.next(i)) - v;
        let e2 = poly.vertex(poly.prev(i)) - v;
        return Some((e1.normalized()?, ccw_angle(e1, e2)));
    }
    (0..poly.len())
        .map(|i| poly.edge(i))
        .find(|&(a, b)| point_segment_dist(p, a, b) <= tol)
        .and_then(|(a, b)| Some(((b - a).normalized()?, PI)))
}

/// Mid directions of the pieces of the intersection of two arcs, each given
/// by a clockwise extreme and a counter-clockwise span, with their lengths.
fn arc_overlaps(a: (Point, f64), b: (Point, f64)) -> Vec<(Point, f64)> {
    let off = ccw_angle(a.0, b.0);
    [off - TAU, off]
        .into_iter()
        .filter_map(|lo| {
            let (l, h) = (lo.max(0.0), (lo + b.1).min(a.1));
            (h > l).then(|| {
                (
                    Rotation::new(Point::default(), 0.5 * (l + h)).apply_vec(a.0),
                    h - l,
                )
            })
        })
        .collect()
}

/// Decide on which side of `seg` the center lies, from the farthest-direction
/// cone at the constrained center. `seg` must be a maximal chord of
/// `container`, a part of the polygon that holds the center and every
/// shortest path between its points.
pub fn line_side(
    provider: &dyn SptProvider,
    seg: &Segment,
    container: &Polygon,
    rng: &mut impl Rng,
    meter: &Meter,
    cfg: &SolverConfig,
) -> Result<(LineVerdict, ConstrainedCenter)> {
    let cc = constrained_geodesic_center(provider, seg, rng, meter, cfg)?;
    let far = farthest_cone(provider, cc.point, cfg.eps, meter)?;
    let cone = far.cone;
    let Some(b) = cone.bisector() else {
        return Ok((LineVerdict::CenterAt(cc.point), cc));
    };
    let n = seg.direction().perp();
    let sign = |v: f64| {
        if v > 0.0 {
            LineVerdict::Left
        } else {
            LineVerdict::Right
        }
    };
    if cc.t <= 0.0 || cc.t >= 1.0 {
        // The set where the radius drops below its value here is connected
        // and misses the segment, so every admissible descent direction
        // enters the same one of the two sectors the segment cuts from the
        // container's wedge at this end.
        let tol = 1e-9 * provider.polygon().scale();
        if let Some(wedge) = boundary_wedge(container, cc.point, tol) {
            let descent = (
                Rotation::new(Point::default(), -FRAC_PI_2).apply_vec(cone.end),
                PI - cone.span,
            );
            let best = arc_overlaps(descent, wedge)
                .into_iter()
                .max_by(|x, y| x.1.total_cmp(&y.1));
            let Some((d, _)) = best.filter(|&(_, len)| len > cfg.eps) else {
                return Ok((LineVerdict::CenterAt(cc.point), cc));
            };
            let at_start = cc.t <= 0.0;
            let inward = if at_start {
                seg.direction()
            } else {
                -seg.direction()
            };
            // Angles from the wedge's clockwise extreme; the segment may run
            // along either extreme, so snap a wrapped angle back onto it.
            let mut at_in = ccw_angle(wedge.0, inward);
            if at_in > wedge.1 {
                at_in = if at_in - wedge.1 < TAU - at_in {
                    wedge.1
                } else {
                    0.0
                };
            }
            let ccw_sector = ccw_angle(wedge.0, d) > at_in;
            // Counter-clockwise from the direction of travel is the left.
            return Ok((
                if ccw_sector == at_start {
                    LineVerdict::Left
                } else {
                    LineVerdict::Right
                },
                cc,
            ));
        }
    }
    let s = b.dot(n);
    if s.abs() <= cfg.eps {
        return Ok((LineVerdict::CenterAt(cc.point), cc));
    }
    Ok((sign(s), cc))
}

/// Which side of a vertical chord (in the sheared frame) holds the center.
pub fn decide_chord_side(
    provider: &dyn SptProvider,
    chord: &VerticalChord,
    shear: Shear,
    rng: &mut impl Rng,
    meter: &Meter,
    cfg: &SolverConfig,
) -> Result<ChordVerdict> {
    // Directed lower to upper, so its left is the smaller sheared abscissa.
    let seg = chord.segment(shear);
    Ok(
        match line_side(provider, &seg, provider.polygon(), rng, meter, cfg)?.0 {
            LineVerdict::CenterAt(p) => ChordVerdict::CenterAt(p),
            LineVerdict::Left => ChordVerdict::Side(Side::Left),
            LineVerdict::Right => ChordVerdict::Side(Side::Right),
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Located {
    CenterAt(Point),
    /// Counter-clockwise corners.
    Triangle([Point; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Localization {
    pub located: Located,
    /// Region vertex counts, one per chord step, starting with `n`.
    pub counts: Vec<usize>,
}

/// Shrink the search to a triangle bounded by chords, or find the center on
/// the way.
pub fn locate_triangle(
    provider: &dyn SptProvider,
    rng: &mut impl Rng,
    meter: &Meter,
    cfg: &SolverConfig,
) -> Result<Localization> {
    let poly = provider.polygon();
    let shear = choose_shear(poly);
    let mut run = BoundaryRun::whole(shear);
    let mut run_words = meter.charge(run.words())?;
    let mut counts = Vec::new();
    let mut count_words: Vec<Charge> = Vec::new();
    let mut push_count = |m: usize, counts: &mut Vec<usize>| -> Result<()> {
        count_words.push(meter.charge(1)?);
        counts.push(m);
        Ok(())
    };
    let mut m = region_vertex_count(poly, &run, meter);
    push_count(m, &mut counts)?;
    while m > SMALL_REGION {
        let split = balanced_vertical_chord(poly, &run, meter)?;
        match decide_chord_side(provider, &split.chord, shear, rng, meter, cfg)? {
            ChordVerdict::CenterAt(p) => {
                return Ok(Localization {
                    located: Located::CenterAt(p),
                    counts,
                })
            }
            ChordVerdict::Side(side) => {
                let next = split_region(poly, &run, &split.chord, side, meter)?;
                drop(run_words);
                run = next;
                run_words = meter.charge(run.words())?;
            }
        }
        m = region_vertex_count(poly, &run, meter);
        push_count(m, &mut counts)?;
    }

    let region = materialize_small_region(poly, &run, meter)?;
    let pts = region.polygon.vertices();
    let tri = ear_clip_triangulate(pts);
    let _tri_words = meter.charge(6 * tri.triangles.len())?;
    if tri.triangles.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let mut t = 0;
    let mut came_from = None;
    'walk: loop {
        let corners = tri.triangles[t];
        for k in 0..3 {
            let Some(t2) = tri.neighbors[t][k] else {
                continue;
            };
            if Some(t2) == came_from {
                continue;
            }
            let (u, w) = (pts[corners[(k + 1) % 3]], pts[corners[(k + 2) % 3]]);
            let Ok(seg) = Segment::new(u, w) else {
                continue;
            };
            // The current triangle is on the left of u -> w.
            match line_side(provider, &seg, &region.polygon, rng, meter, cfg)?.0 {
                LineVerdict::CenterAt(p) => {
                    return Ok(Localization {
                        located: Located::CenterAt(p),
                        counts,
                    })
                }
                LineVerdict::Right => {
                    came_from = Some(t);
                    t = t2;
                    continue 'walk;
                }
                LineVerdict::Left => {}
            }
        }
        let c = tri.triangles[t];
        return Ok(Localization {
            located: Located::Triangle([pts[c[0]], pts[c[1]], pts[c[2]]]),
            counts,
        });
    }
}

/// Clip a convex counter-clockwise polygon to a half-plane.
fn clip(poly: &[Point], h: &HalfPlane) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(poly.len() + 1);
    // A cut through a vertex can produce it twice; a zero-length edge has
    // no direction, so keep one copy.
    let mut push = |p: Point| {
        if out.last().map_or(true, |&q| !nearly_equal(p, q)) {
            out.push(p);
        }
    };
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (da, db) = (h.inside_dist(a), h.inside_dist(b));
        if da >= 0.0 {
            push(a);
        }
        if (da >= 0.0) != (db >= 0.0) {
            push(a.lerp(b, da / (da - db)));
        }
    }
    if out.len() > 1 && nearly_equal(out[0], out[out.len() - 1]) {
        out.pop();
    }
    out
}

fn nearly_equal(p: Point, q: Point) -> bool {
    p.dist(q) <= 1e-12 * (1.0 + p.norm().max(q.norm()))
}

fn ccw(mut t: [Point; 3]) -> [Point; 3] {
    if (t[1] - t[0]).cross(t[2] - t[0]) < 0.0 {
        t.swap(1, 2);
    }
    t
}

/// A triangle cut by half-planes, with the tree fingerprint at its interior
/// point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub triangle: [Point; 3],
    pub halfplanes: Vec<HalfPlane>,
    pub fingerprint: u64,
}

impl Region {
    pub fn new(triangle: [Point; 3]) -> Self {
        Self {
            triangle: ccw(triangle),
            halfplanes: Vec::new(),
            fingerprint: 0,
        }
    }

    /// The region as a convex counter-clockwise polygon.
    pub fn polygon(&self) -> Vec<Point> {
        self.halfplanes
            .iter()
            .fold(self.triangle.to_vec(), |p, h| clip(&p, h))
    }

    pub fn words(&self) -> usize {
        7 + HALFPLANE_WORDS * self.halfplanes.len()
    }

    /// Vertex average of the region polygon.
    pub fn interior_point(&self) -> Option<Point> {
        let p = self.polygon();
        if p.len() < 3 {
            return None;
        }
        let s = p.iter().fold(Point::default(), |a, &b| a + b);
        Some(s * (1.0 / p.len() as f64))
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let t = &self.triangle;
        (0..3).all(|i| {
            (t[(i + 1) % 3] - t[i]).cross(p - t[i]) >= -tol * (t[(i + 1) % 3] - t[i]).norm()
        }) && self.halfplanes.iter().all(|h| h.contains(p, tol))
    }

    fn add(&mut self, h: HalfPlane) {
        self.halfplanes.push(h);
        // Drop cuts that no longer touch the region.
        let poly = self.polygon();
        let scale = poly.iter().map(|p| p.norm()).fold(1.0, f64::max);
        self.halfplanes.retain(|h| {
            poly.iter()
                .any(|&p| h.inside_dist(p).abs() <= 1e-12 * scale)
        });
    }
}

/// Does the line cross the interior of the convex polygon?
fn crosses(line: &DirectedLine, poly: &[Point], tol: f64) -> bool {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &p in poly {
        let d = line.signed_dist(p);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    lo < -tol && hi > tol
}

/// Parameter range of `line` inside the convex polygon.
fn line_span(line: &DirectedLine, poly: &[Point]) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        if nearly_equal(a, b) {
            continue;
        }
        let e = b - a;
        // Inside is left of each edge: e x (o + t d - a) >= 0.
        let c0 = e.cross(line.origin - a);
        let c1 = e.cross(line.direction);
        if c1.abs() < 1e-300 {
            if c0 < 0.0 {
                return None;
            }
            continue;
        }
        let t = -c0 / c1;
        if c1 > 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
    }
    (t0 < t1).then_some((t0, t1))
}

/// The chord of the polygon through interior point `p` along `dir`.
pub fn chord_through(poly: &Polygon, p: Point, dir: Point, meter: &Meter) -> Option<Segment> {
    let _w = meter.charge(4).ok()?;
    let d = dir.normalized()?;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..poly.len() {
        let (a, b) = poly.edge(i);
        let e = b - a;
        let den = d.cross(e);
        if den == 0.0 {
            continue;
        }
        let s = (a - p).cross(e) / den;
        let mut u = (a - p).cross(d) / den;
        // Snap hits within rounding of an edge end onto the vertex.
        const SNAP: f64 = 1e-12;
        if u.abs() <= SNAP {
            u = 0.0;
        } else if (u - 1.0).abs() <= SNAP {
            u = 1.0;
        }
        if !(0.0..=1.0).contains(&u) {
            continue;
        }
        // A vertex the line stays in the closed polygon past does not end
        // the chord; this also carries it along collinear edges.
        if u == 0.0 || u == 1.0 {
            let v = if u == 0.0 { i } else { poly.next(i) };
            let ahead = if s >= 0.0 { d } else { -d };
            if s != 0.0 && poly.admits(v, ahead) {
                continue;
            }
        }
        if s > 0.0 {
            hi = hi.min(s);
        } else if s < 0.0 {
            lo = lo.max(s);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        return None;
    }
    Segment::new(p + d * lo, p + d * hi).ok()
}

/// Rotation by `-angle` followed by the shear `y -> y - slope * x`.
#[derive(Debug, Clone, Copy)]
struct Frame {
    rot: Rotation,
    slope: f64,
}

impl Frame {
    fn new(angle: f64, slope: f64) -> Self {
        Self {
            rot: Rotation::new(Point::default(), -angle),
            slope,
        }
    }

    fn vec(&self, v: Point) -> Point {
        let r = self.rot.apply_vec(v);
        Point::new(r.x, r.y - self.slope * r.x)
    }

    fn point(&self, p: Point) -> Point {
        self.vec(p)
    }

    fn inv_vec(&self, v: Point) -> Point {
        self.rot
            .inverse()
            .apply_vec(Point::new(v.x, v.y + self.slope * v.x))
    }

    /// Slope of a line in this frame; vertical lines get `f64::MAX`.
    fn slope_of(&self, line: &DirectedLine) -> f64 {
        let d = self.vec(line.direction);
        if d.x.abs() <= 1e-15 * d.y.abs() {
            f64::MAX
        } else {
            d.y / d.x
        }
    }

    fn vertical(&self, x: f64) -> DirectedLine {
        DirectedLine {
            origin: self.inv_vec(Point::new(x, 0.0)),
            direction: self.inv_vec(Point::new(0.0, 1.0)).normalized().unwrap(),
        }
    }

    fn horizontal(&self, y: f64) -> DirectedLine {
        DirectedLine {
            origin: self.inv_vec(Point::new(0.0, y)),
            direction: self.inv_vec(Point::new(1.0, 0.0)).normalized().unwrap(),
        }
    }
}

/// Outcome of [`line_prune_rounds`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Pruned {
    CenterAt(Point),
    Region(Region),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PruneOutcome {
    pub pruned: Pruned,
    pub trace: DecisionTrace,
    /// Active line counts before each round.
    pub counts: Vec<usize>,
}

struct LinePruner<'a> {
    provider: &'a dyn SptProvider,
    corners: [Point; 3],
    meter: &'a Meter,
    cfg: SolverConfig,
    tol: f64,
}

impl LinePruner<'_> {
    /// Lines through non-root edges of the trees at the three corners that
    /// cross the region interior.
    fn active<'s>(
        &'s self,
        region: &'s [Point],
    ) -> Result<impl Iterator<Item = DirectedLine> + 's> {
        let mut streams = Vec::with_capacity(3);
        for c in self.corners {
            streams.push(self.provider.stream(c, self.meter)?);
        }
        let tol = self.tol;
        Ok(streams
            .into_iter()
            .flatten()
            .filter(|e| matches!(e.parent, Parent::Vertex(_)))
            .filter_map(|e| DirectedLine::through(e.parent_point, e.child_point).ok())
            .filter(move |l| crosses(l, region, tol)))
    }

    /// Crossing points, in `frame`, of rising lines paired with falling
    /// ones by two interleaved cursors. Leftovers are unpaired.
    fn crossings<'s>(
        &'s self,
        region: &'s [Point],
        frame: Frame,
    ) -> Result<impl Iterator<Item = Point> + 's> {
        let up = self
            .active(region)?
            .filter(move |l| frame.slope_of(l) > 0.0);
        let down = self
            .active(region)?
            .filter(move |l| frame.slope_of(l) <= 0.0);
        Ok(up
            .zip(down)
            .filter_map(move |(a, b)| a.intersect(&b))
            .map(move |p| frame.point(p)))
    }

    fn count(&self, region: &[Point]) -> Result<usize> {
        Ok(self.active(region)?.count())
    }

    /// The half-plane bounded by `line` that holds the center, or `None`
    /// when the line misses the region.
    fn cut(
        &self,
        line: &DirectedLine,
        region: &[Point],
        rng: &mut impl Rng,
    ) -> Result<Option<std::result::Result<HalfPlane, Point>>> {
        if !crosses(line, region, self.tol) {
            return Ok(None);
        }
        let Some((t0, t1)) = line_span(line, region) else {
            return Ok(None);
        };
        let mid = line.origin + line.direction * (0.5 * (t0 + t1));
        let Some(seg) = chord_through(self.provider.polygon(), mid, line.direction, self.meter)
        else {
            return Ok(None);
        };
        let (verdict, cc) = line_side(
            self.provider,
            &seg,
            self.provider.polygon(),
            rng,
            self.meter,
            &self.cfg,
        )?;
        let boundary = DirectedLine {
            origin: seg.a,
            direction: seg.direction(),
        };
        let side = match verdict {
            LineVerdict::CenterAt(p) => return Ok(Some(Err(p))),
            LineVerdict::Left => Side::Left,
            LineVerdict::Right => Side::Right,
        };
        let h = HalfPlane { boundary, side };
        if self.cfg.check_pruning {
            self.check_cut(&h, &cc, line, (t0, t1), region)?;
        }
        Ok(Some(Ok(h)))
    }

    /// Sampled check of a cut. If the center is on the kept side, every
    /// discarded point reaches the chord optimum along a geodesic that
    /// crosses the chord, so by convexity its radius is no smaller.
    fn check_cut(
        &self,
        h: &HalfPlane,
        cc: &ConstrainedCenter,
        line: &DirectedLine,
        span: (f64, f64),
        region: &[Point],
    ) -> Result<()> {
        let gone: Vec<Point> = region
            .iter()
            .copied()
            .filter(|&p| h.inside_dist(p) < -self.tol)
            .collect();
        if gone.is_empty() {
            return Ok(());
        }
        // A private meter keeps the check out of the reported counters.
        let meter = Meter::unbounded(self.provider.polygon().len());
        let slack = 1e-9 * self.provider.polygon().scale();
        let mut violated = false;
        for k in 0..PRUNING_SAMPLES {
            let t = span.0 + (span.1 - span.0) * (k as f64 + 0.5) / PRUNING_SAMPLES as f64;
            let on_line = line.origin + line.direction * t;
            let frac = 0.1 + 0.9 * ((k * 37) % PRUNING_SAMPLES) as f64 / PRUNING_SAMPLES as f64;
            let x = on_line.lerp(gone[k % gone.len()], frac);
            if geodesic_radius(self.provider, x, &meter)? < cc.radius - slack {
                violated = true;
                break;
            }
        }
        self.meter.count_pruning_check(violated);
        Ok(())
    }
}

/// Which sign of the frame coordinate the kept half-plane has.
fn keep_sign(h: &HalfPlane, frame: &Frame, axis: Point) -> i8 {
    let inward = match h.side {
        Side::Left => h.boundary.direction.perp(),
        Side::Right => -h.boundary.direction.perp(),
    };
    let v = frame.vec(inward);
    if v.dot(axis) >= 0.0 {
        1
    } else {
        -1
    }
}

/// Cut the triangle by half-planes until no line through an edge of the
/// corner trees crosses it.
pub fn line_prune_rounds(
    provider: &dyn SptProvider,
    triangle: [Point; 3],
    rng: &mut impl Rng,
    meter: &Meter,
    cfg: &SolverConfig,
) -> Result<PruneOutcome> {
    let mut region = Region::new(triangle);
    let mut region_words = meter.charge(region.words())?;
    let mut poly = region.polygon();
    let mut poly_words = meter.charge(2 * poly.len())?;
    let mut trace = DecisionTrace::new();
    let mut trace_words: Vec<Charge> = Vec::new();
    let mut counts = Vec::new();
    let mut count_words: Vec<Charge> = Vec::new();
    let tol = cfg.eps * provider.polygon().scale();
    let pr = LinePruner {
        provider,
        corners: region.triangle,
        meter,
        cfg: *cfg,
        tol,
    };

    macro_rules! apply {
        ($h:expr) => {
            match $h {
                None => None,
                Some(Err(p)) => {
                    return Ok(PruneOutcome {
                        pruned: Pruned::CenterAt(p),
                        trace,
                        counts,
                    })
                }
                Some(Ok(h)) => {
                    region.add(h);
                    drop(region_words);
                    region_words = meter.charge(region.words())?;
                    poly = region.polygon();
                    drop(poly_words);
                    poly_words = meter.charge(2 * poly.len())?;
                    if poly.len() < 3 {
                        return Err(Error::EmptyRegion);
                    }
                    Some(h)
                }
            }
        };
    }

    let mut m = pr.count(&poly)?;
    let mut stalls = 0;
    while m > LINE_BASE_CASE && stalls < 3 {
        count_words.push(meter.charge(1)?);
        counts.push(m);
        // A random rotation makes vertical lines improbable; the shear then
        // brings the median slope to zero while keeping slope order.
        let angle = rng.gen_range(0.0..std::f64::consts::PI);
        let base = Frame::new(angle, 0.0);
        let slope = approx_median(
            || Ok(pr.active(&poly)?.map(|l| base.slope_of(&l))),
            Window::ALL,
            rng,
            meter,
        )?
        .value;
        if slope == f64::MAX {
            stalls += 1;
            continue;
        }
        let frame = Frame::new(angle, slope);
        // Pairs are fixed by the region at the start of the round.
        let start = poly.clone();
        let _start_words = meter.charge(2 * start.len())?;
        let x_cut = match approx_median(
            || Ok(pr.crossings(&start, frame)?.map(|p| p.x)),
            Window::ALL,
            rng,
            meter,
        ) {
            Ok(med) => med.value,
            Err(Error::Empty(_)) => {
                stalls += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let vertical = frame.vertical(x_cut);
        let hx = pr.cut(&vertical, &poly, rng)?;
        // Which side of the vertical survives, decided by the region when
        // the line misses it.
        let x_keep = match &hx {
            Some(Ok(h)) => keep_sign(h, &frame, Point::new(1.0, 0.0)),
            Some(Err(_)) => 0,
            None => {
                if poly.iter().any(|&p| frame.point(p).x > x_cut) {
                    1
                } else {
                    -1
                }
            }
        };
        apply!(hx);
        let xs = f64::from(x_keep);
        let y_cut = match approx_median(
            || {
                Ok(pr
                    .crossings(&start, frame)?
                    .filter(move |p| xs * p.x <= xs * x_cut)
                    .map(|p| p.y))
            },
            Window::ALL,
            rng,
            meter,
        ) {
            Ok(med) => Some(med.value),
            Err(Error::Empty(_)) => None,
            Err(e) => return Err(e),
        };
        let mut y_keep = 0;
        if let Some(y) = y_cut {
            let hy = pr.cut(&frame.horizontal(y), &poly, rng)?;
            if let Some(Ok(h)) = &hy {
                y_keep = keep_sign(h, &frame, Point::new(0.0, 1.0));
            }
            apply!(hy);
        }
        trace_words.push(meter.charge(LevelDecision::WORDS)?);
        trace.push(LevelDecision::Region {
            angle,
            slope,
            x_cut,
            x_keep,
            y_cut: y_cut.unwrap_or(f64::NAN),
            y_keep,
        });
        let next = pr.count(&poly)?;
        meter.record_level_decay(m, next);
        if next >= m {
            stalls += 1;
        } else {
            stalls = 0;
        }
        m = next;
    }

    // Few lines left: cut along each one.
    let budget = 4 * m + 16;
    // Lines that cannot be cut (degenerate spans) are passed over.
    let mut skipped = 0;
    for _ in 0..budget {
        let Some(line) = pr.active(&poly)?.nth(skipped) else {
            break;
        };
        let h = pr.cut(&line, &poly, rng)?;
        if h.is_none() {
            skipped += 1;
            continue;
        }
        apply!(h);
    }
    drop(poly_words);
    let Some(x) = region.interior_point() else {
        return Err(Error::EmptyRegion);
    };
    region.fingerprint = circle_fingerprint(provider, x, meter)?;
    drop(region_words);
    Ok(PruneOutcome {
        pruned: Pruned::Region(region),
        trace,
        counts,
    })
}

/// Vertical extent of the convex polygon at abscissa `x`.
fn vertical_span(poly: &[Point], x: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        if (a.x <= x && x <= b.x) || (b.x <= x && x <= a.x) {
            let y = if a.x == b.x {
                lo = lo.min(a.y.min(b.y));
                hi = hi.max(a.y.max(b.y));
                continue;
            } else {
                a.y + (x - a.x) / (b.x - a.x) * (b.y - a.y)
            };
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Minimum of the circle envelope on the region's vertical section at `x`:
/// the point, its value, and whether it sits at an end of the section.
fn section_min<S: CircleSource + ?Sized>(
    source: &S,
    poly: &[Point],
    x: f64,
    scale: f64,
    rng: &mut impl Rng,
    meter: &Meter,
    cfg: &SolverConfig,
) -> Result<(Point, f64, bool)> {
    let (lo, hi) = vertical_span(poly, x).ok_or(Error::EmptyRegion)?;
    match Segment::new(Point::new(x, lo), Point::new(x, hi)) {
        Ok(seg) => {
            let opt =
                minimize_on_segment(source, &seg, Window::new(0.0, 1.0), scale, rng, meter, cfg)?;
            Ok((opt.point, opt.radius, opt.t <= 0.0 || opt.t >= 1.0))
        }
        Err(_) => {
            let p = Point::new(x, lo);
            let v = source
                .circles()?
                .map(|c| c.circle.value(p))
                .fold(f64::NEG_INFINITY, f64::max);
            Ok((p, v, true))
        }
    }
}

/// Minimize `max_i |x - q_i| + f_i` over a convex counter-clockwise region,
/// by bisection on the abscissa with a one-dimensional solve per probe.
pub fn solve_in_region<S: CircleSource + ?Sized>(
    source: &S,
    region: &[Point],
    scale: f64,
    rng: &mut impl Rng,
    meter: &Meter,
    cfg: &SolverConfig,
) -> Result<(Point, f64)> {
    if region.len() < 3 || crate::polygon::signed_area(region) <= 0.0 {
        return Err(Error::EmptyRegion);
    }
    let _w = meter.charge(12)?;
    let (mut xl, mut xr) = region
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, r), p| {
            (l.min(p.x), r.max(p.x))
        });
    let width = xr - xl;
    let tol = cfg.eps * scale;
    let mut best: Option<(Point, f64)> = None;
    let keep = |p: Point, v: f64, best: &mut Option<(Point, f64)>| {
        if best.map_or(true, |b| v < b.1) {
            *best = Some((p, v));
        }
    };
    while xr - xl > 1e-3 * cfg.eps * width {
        let x = 0.5 * (xl + xr);
        let (p, v, at_end) = section_min(source, region, x, scale, rng, meter, cfg)?;
        keep(p, v, &mut best);
        let step = if at_end {
            // The anchor test needs a free vertical optimum; compare the
            // neighbouring sections instead (the section minimum is convex).
            let h = 0.25 * (xr - xl);
            let (pl, vl, _) = section_min(source, region, x - h, scale, rng, meter, cfg)?;
            let (pr, vr, _) = section_min(source, region, x + h, scale, rng, meter, cfg)?;
            keep(pl, vl, &mut best);
            keep(pr, vr, &mut best);
            if vl < v && vl <= vr {
                -1
            } else if vr < v {
                1
            } else {
                xl = x - h;
                xr = x + h;
                continue;
            }
        } else {
            let (_, cone) = envelope_cone(source.circles()?, p, tol);
            match cone.bisector() {
                Some(b) if b.x > cfg.eps => 1,
                Some(b) if b.x < -cfg.eps => -1,
                _ => {
                    best = Some((p, v));
                    break;
                }
            }
        };
        if step > 0 {
            xl = x;
        } else {
            xr = x;
        }
    }
    let (p, _) = match best {
        Some(b) => b,
        None => section_min(source, region, 0.5 * (xl + xr), scale, rng, meter, cfg)
            .map(|(p, v, _)| (p, v))?,
    };
    let v = source
        .circles()?
        .map(|c| c.circle.value(p))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((p, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterConfig {
    pub budget: WorkspaceBudget,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl CenterConfig {
    pub fn for_polygon(poly: &Polygon) -> Self {
        Self {
            budget: WorkspaceBudget::default_for(poly.len()),
            seed: 0,
            solver: SolverConfig::default(),
        }
    }
}

/// Where the center was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stage {
    ChordRecursion,
    LinePruning,
    Region,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterResult {
    pub center: Point,
    pub radius: f64,
    /// Farthest vertices from the center.
    pub support: Vec<usize>,
    pub stage: Stage,
    /// Region vertex counts through the chord recursion.
    pub chord_counts: Vec<usize>,
    pub prune_rounds: usize,
    pub report: WorkspaceReport,
}

/// Geodesic center of `poly` under the workspace budget of `cfg`.
pub fn geodesic_center(poly: &Polygon, cfg: &CenterConfig) -> Result<CenterResult> {
    let meter = Meter::new(cfg.budget, poly.len());
    let provider = FunnelProvider::new(poly);
    geodesic_center_with(&provider, &meter, cfg)
}

/// [`geodesic_center`] with a caller-supplied provider and meter.
pub fn geodesic_center_with(
    provider: &dyn SptProvider,
    meter: &Meter,
    cfg: &CenterConfig,
) -> Result<CenterResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let solver = &cfg.solver;
    let loc = locate_triangle(provider, &mut rng, meter, solver)?;
    let mut rounds = 0;
    let (center, stage) = match loc.located {
        Located::CenterAt(p) => (p, Stage::ChordRecursion),
        Located::Triangle(tri) => {
            let pruned = line_prune_rounds(provider, tri, &mut rng, meter, solver)?;
            rounds = pruned.trace.len();
            match pruned.pruned {
                Pruned::CenterAt(p) => (p, Stage::LinePruning),
                Pruned::Region(region) => {
                    let poly = region.polygon();
                    let _w = meter.charge(2 * poly.len())?;
                    let root = region.interior_point().ok_or(Error::EmptyRegion)?;
                    let source = TreeCircles {
                        provider,
                        root,
                        meter,
                    };
                    let scale = provider.polygon().scale();
                    let (p, _) = solve_in_region(&source, &poly, scale, &mut rng, meter, solver)?;
                    (p, Stage::Region)
                }
            }
        }
    };
    let radius = geodesic_radius(provider, center, meter)?;
    let support = farthest_neighbors(provider, center, solver.eps, meter)?.vertices;
    Ok(CenterResult {
        center,
        radius,
        support,
        stage,
        chord_counts: loc.counts,
        prune_rounds: rounds,
        report: meter.report(),
    })
}
