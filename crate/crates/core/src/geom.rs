//! Planar primitives shared by every stage of the pipeline.
//!
//! Topology (orientation) is decided exactly; everything metric uses plain
//! `f64` with explicit tolerances.

use std::ops::{Add, Mul, Neg, Sub};

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::error::GeomError;

/// Default tolerance for metric comparisons.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Tolerance used when back-substituting candidate bisector roots.
const ROOT_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Unit vector in the same direction, or `None` for (near) zero vectors.
    pub fn normalized(self) -> Option<Point> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(Point::new(self.x / n, self.y / n))
        } else {
            None
        }
    }

    #[inline]
    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + t * (o.x - self.x), self.y + t * (o.y - self.y))
    }

    #[inline]
    pub fn midpoint(self, o: Point) -> Point {
        self.lerp(o, 0.5)
    }

    /// Counter-clockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }
}

impl Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    #[inline]
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Exact sign of the orientation of the triangle `abc`: `+1` for a
/// counter-clockwise turn, `-1` for clockwise, `0` for collinear.
pub fn orient(a: Point, b: Point, c: Point) -> i8 {
    let det = robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    );
    // robust returns a positive value when c lies to the left of ab.
    if det > 0.0 {
        1
    } else if det < 0.0 {
        -1
    } else {
        0
    }
}

/// A segment `x(t) = a + t (b - a)` for `t` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self, GeomError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(GeomError::NonFinite);
        }
        if a == b {
            return Err(GeomError::DegenerateSegment);
        }
        Ok(Self { a, b })
    }

    #[inline]
    pub fn at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    #[inline]
    pub fn delta(&self) -> Point {
        self.b - self.a
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.delta().norm()
    }

    /// Unit direction from `a` to `b`.
    pub fn direction(&self) -> Point {
        self.delta()
            .normalized()
            .expect("segment endpoints are distinct")
    }

    /// Parameter of the orthogonal projection of `p` onto the supporting line.
    pub fn project(&self, p: Point) -> f64 {
        let d = self.delta();
        (p - self.a).dot(d) / d.norm2()
    }

    /// Parameter `t` where the infinite line through `p` and `q` meets the
    /// supporting line of the segment. `None` when parallel or collinear.
    pub fn line_hit(&self, p: Point, q: Point) -> Option<f64> {
        let d = self.delta();
        let e = q - p;
        let denom = d.cross(e);
        let scale = d.norm() * e.norm();
        if denom.abs() <= 1e-14 * scale || scale == 0.0 {
            return None;
        }
        Some((p - self.a).cross(e) / denom)
    }
}

/// An oriented line; its left side is the positive half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectedLine {
    pub origin: Point,
    pub direction: Point,
}

impl DirectedLine {
    pub fn new(origin: Point, direction: Point) -> Result<Self, GeomError> {
        let direction = direction.normalized().ok_or(GeomError::DegenerateSegment)?;
        Ok(Self { origin, direction })
    }

    pub fn through(p: Point, q: Point) -> Result<Self, GeomError> {
        Self::new(p, q - p)
    }

    /// Signed distance of `p` from the line, positive on the left.
    #[inline]
    pub fn signed_dist(&self, p: Point) -> f64 {
        self.direction.cross(p - self.origin)
    }

    /// Slope angle in `(-pi/2, pi/2]`, identifying a line irrespective of
    /// its orientation.
    pub fn slope_angle(&self) -> f64 {
        let mut a = self.direction.y.atan2(self.direction.x);
        if a <= -std::f64::consts::FRAC_PI_2 {
            a += std::f64::consts::PI;
        } else if a > std::f64::consts::FRAC_PI_2 {
            a -= std::f64::consts::PI;
        }
        a
    }

    pub fn intersect(&self, other: &DirectedLine) -> Option<Point> {
        let denom = self.direction.cross(other.direction);
        if denom.abs() < 1e-14 {
            return None;
        }
        let t = (other.origin - self.origin).cross(other.direction) / denom;
        Some(self.origin + self.direction * t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub boundary: DirectedLine,
    pub side: Side,
}

impl HalfPlane {
    /// Signed distance that is nonnegative inside the half-plane.
    #[inline]
    pub fn inside_dist(&self, p: Point) -> f64 {
        let d = self.boundary.signed_dist(p);
        match self.side {
            Side::Left => d,
            Side::Right => -d,
        }
    }

    #[inline]
    pub fn contains(&self, p: Point, eps: f64) -> bool {
        self.inside_dist(p) >= -eps
    }
}

/// The constraint `|x - anchor| + offset <= rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleConstraint {
    pub anchor: Point,
    pub offset: f64,
}

impl CircleConstraint {
    pub fn new(anchor: Point, offset: f64) -> Result<Self, GeomError> {
        if !anchor.is_finite() || !offset.is_finite() {
            return Err(GeomError::NonFinite);
        }
        if offset < 0.0 {
            return Err(GeomError::NegativeOffset(offset));
        }
        Ok(Self { anchor, offset })
    }

    #[inline]
    pub fn value(&self, x: Point) -> f64 {
        x.dist(self.anchor) + self.offset
    }
}

/// Which of two constraints a statement refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    First,
    Second,
    /// Numerically indistinguishable at the probe.
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectorHit {
    pub t: f64,
    /// The constraint with the smaller value just below `t`.
    pub smaller_below: Which,
}

/// Smaller constraint at `x`, with a relative tie band.
pub fn smaller_at(c1: &CircleConstraint, c2: &CircleConstraint, x: Point) -> Which {
    let v1 = c1.value(x);
    let v2 = c2.value(x);
    let tol = 1e-12 * (1.0 + v1.abs().max(v2.abs()));
    if v1 < v2 - tol {
        Which::First
    } else if v2 < v1 - tol {
        Which::Second
    } else {
        Which::Tie
    }
}

/// Solve `q2 t^2 + q1 t + q0 = 0`, degrading to the linear case when the
/// leading coefficient vanishes relative to the others.
fn real_roots(q2: f64, q1: f64, q0: f64) -> ArrayVec<f64, 2> {
    let mut out = ArrayVec::new();
    let scale = q2.abs().max(q1.abs()).max(q0.abs());
    if scale == 0.0 {
        return out;
    }
    if q2.abs() <= 1e-14 * scale {
        if q1 != 0.0 {
            out.push(-q0 / q1);
        }
        return out;
    }
    let disc = q1 * q1 - 4.0 * q2 * q0;
    if disc < -1e-12 * q1 * q1.max(1.0) {
        return out;
    }
    let sq = disc.max(0.0).sqrt();
    // Numerically stable pair.
    let sign = if q1 >= 0.0 { 1.0 } else { -1.0 };
    let qq = -0.5 * (q1 + sign * sq);
    if qq == 0.0 {
        out.push(0.0);
        return out;
    }
    let r1 = qq / q2;
    let r2 = q0 / qq;
    out.push(r1.min(r2));
    out.push(r1.max(r2));
    out
}

/// All parameters `t` in `[0, 1]` where the two constraint values agree
/// along `seg`, sorted ascending.
///
/// The locus is one branch of a hyperbola with foci at the two anchors, so a
/// line meets it at most twice.
pub fn covering_bisector_hits(
    c1: &CircleConstraint,
    c2: &CircleConstraint,
    seg: &Segment,
) -> Result<ArrayVec<BisectorHit, 2>, GeomError> {
    let mut out = ArrayVec::new();
    if c1.anchor == c2.anchor {
        if c1.offset == c2.offset {
            return Err(GeomError::IdenticalConstraints);
        }
        // One dominates the other everywhere.
        return Ok(out);
    }
    let (q1, q2) = (c1.anchor, c2.anchor);
    let gap = c2.offset - c1.offset;
    if gap.abs() > q1.dist(q2) {
        return Ok(out);
    }
    let a = seg.a;
    let d = seg.delta();
    // |x-q1|^2 - |x-q2|^2 = lin0 + lin1 t
    let lin0 = 2.0 * a.dot(q2 - q1) + q1.norm2() - q2.norm2();
    let lin1 = 2.0 * d.dot(q2 - q1);
    let k0 = lin0 - gap * gap;

    let mut candidates: ArrayVec<f64, 2> = ArrayVec::new();
    if gap == 0.0 {
        if lin1 == 0.0 {
            if k0.abs() <= ROOT_CHECK_TOL * (1.0 + lin0.abs()) {
                return Err(GeomError::CoincidentOnSegment);
            }
            return Ok(out);
        }
        candidates.push(-k0 / lin1);
    } else {
        let aq = a - q2;
        let g2 = 4.0 * gap * gap;
        let qa = g2 * d.norm2() - lin1 * lin1;
        let qb = 2.0 * g2 * d.dot(aq) - 2.0 * lin1 * k0;
        let qc = g2 * aq.norm2() - k0 * k0;
        candidates = real_roots(qa, qb, qc);
    }

    let scale = 1.0 + c1.offset.abs().max(c2.offset.abs()) + seg.len() + q1.dist(q2);
    let mut accepted: ArrayVec<f64, 2> = ArrayVec::new();
    for &t in &candidates {
        if !t.is_finite() || t < -1e-12 || t > 1.0 + 1e-12 {
            continue;
        }
        let t = t.clamp(0.0, 1.0);
        let x = seg.at(t);
        let h = c1.value(x) - c2.value(x);
        if h.abs() > ROOT_CHECK_TOL * scale {
            continue;
        }
        if accepted.iter().any(|&u| (u - t).abs() <= 1e-12) {
            continue;
        }
        accepted.push(t);
    }
    accepted.sort_by(|x, y| x.total_cmp(y));

    let mut prev = f64::NEG_INFINITY;
    for &t in &accepted {
        let gapt = t - prev;
        let eta = if gapt.is_finite() && gapt > 0.0 {
            (0.5 * gapt).min(1e-6)
        } else {
            1e-6
        };
        let below = seg.at(t - eta);
        out.push(BisectorHit {
            t,
            smaller_below: smaller_at(c1, c2, below),
        });
        prev = t;
    }
    Ok(out)
}

/// A rigid rotation about a pivot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    pub pivot: Point,
    pub angle: f64,
    cos: f64,
    sin: f64,
}

impl Rotation {
    pub fn new(pivot: Point, angle: f64) -> Self {
        let (sin, cos) = angle.sin_cos();
        Self {
            pivot,
            angle,
            cos,
            sin,
        }
    }

    /// The rotation that maps `line` onto a line parallel to the x-axis.
    pub fn leveling(line: &DirectedLine) -> Self {
        Self::new(line.origin, -line.slope_angle())
    }

    #[inline]
    pub fn apply_vec(&self, v: Point) -> Point {
        Point::new(
            self.cos * v.x - self.sin * v.y,
            self.sin * v.x + self.cos * v.y,
        )
    }

    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        self.pivot + self.apply_vec(p - self.pivot)
    }

    pub fn apply_line(&self, l: &DirectedLine) -> DirectedLine {
        DirectedLine {
            origin: self.apply(l.origin),
            direction: self.apply_vec(l.direction),
        }
    }

    pub fn inverse(&self) -> Rotation {
        Rotation {
            pivot: self.pivot,
            angle: -self.angle,
            cos: self.cos,
            sin: -self.sin,
        }
    }
}

/// Golden-section search for the minimum of a unimodal function on
/// `[lo, hi]`, to interval width `tol`. Returns the argument and value.
pub fn unimodal_min(mut lo: f64, mut hi: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (hi - R * (hi - lo), lo + R * (hi - lo));
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa <= fb {
            (hi, b, fb) = (b, a, fa);
            a = hi - R * (hi - lo);
            fa = f(a);
        } else {
            (lo, a, fa) = (a, b, fb);
            b = lo + R * (hi - lo);
            fb = f(b);
        }
    }
    let mid = 0.5 * (lo + hi);
    [(a, fa), (b, fb)]
        .into_iter()
        .fold((mid, f(mid)), |best, c| if c.1 < best.1 { c } else { best })
}

/// Angle of `v` measured counter-clockwise from `from`, in `[0, 2pi)`.
pub fn ccw_angle(from: Point, v: Point) -> f64 {
    let a = from.cross(v).atan2(from.dot(v));
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

/// Smallest cone containing a stream of unit directions, kept in O(1) words.
///
/// Once no open half-plane contains the directions the cone is marked full.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionCone {
    /// Clockwise extreme.
    pub start: Point,
    /// Counter-clockwise extreme.
    pub end: Point,
    pub span: f64,
    pub full: bool,
    pub count: usize,
}

impl DirectionCone {
    /// Span at which the cone is considered to escape every open half-plane.
    pub const HALF_TURN_TOL: f64 = 1e-9;

    pub fn empty() -> Self {
        Self {
            start: Point::new(1.0, 0.0),
            end: Point::new(1.0, 0.0),
            span: 0.0,
            full: false,
            count: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn insert(&mut self, dir: Point) {
        let Some(dir) = dir.normalized() else {
            return;
        };
        self.count += 1;
        if self.count == 1 {
            self.start = dir;
            self.end = dir;
            self.span = 0.0;
            return;
        }
        if self.full {
            return;
        }
        let off = ccw_angle(self.start, dir);
        if off <= self.span {
            return;
        }
        // Either extend the counter-clockwise end or the clockwise start.
        let grow_end = off;
        let grow_start = self.span + (std::f64::consts::TAU - off);
        if grow_end <= grow_start {
            self.end = dir;
            self.span = grow_end;
        } else {
            self.start = dir;
            self.span = grow_start;
        }
        if self.span >= std::f64::consts::PI - Self::HALF_TURN_TOL {
            self.full = true;
        }
    }

    /// Unit vector halving the cone; `None` when empty or full.
    pub fn bisector(&self) -> Option<Point> {
        if self.count == 0 || self.full {
            return None;
        }
        let half = 0.5 * self.span;
        Some(Rotation::new(Point::default(), half).apply_vec(self.start))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient(p(0., 0.), p(1., 0.), p(0., 1.)), 1);
        assert_eq!(orient(p(0., 0.), p(1., 1.), p(2., 2.)), 0);
        assert_eq!(orient(p(0., 0.), p(0., 1.), p(1., 1.)), -1);
    }

    #[test]
    fn orient_is_exact_near_collinear() {
        let a = p(0.5, 0.5);
        let b = p(12.0, 12.0);
        let c = p(24.0, 24.0);
        assert_eq!(orient(a, b, c), 0);
        let c2 = p(24.0, 24.0 + 1e-14);
        assert_eq!(orient(a, b, c2), 1);
    }

    #[test]
    fn bisector_equal_offsets() {
        let c1 = CircleConstraint::new(p(0., 0.), 1.0).unwrap();
        let c2 = CircleConstraint::new(p(2., 0.), 1.0).unwrap();
        let seg = Segment::new(p(-1., 0.), p(3., 0.)).unwrap();
        let hits = covering_bisector_hits(&c1, &c2, &seg).unwrap();
        assert_eq!(hits.len(), 1);
        assert!((hits[0].t - 0.5).abs() < 1e-12);
        assert_eq!(hits[0].smaller_below, Which::First);
    }

    #[test]
    fn bisector_on_axis_solve() {
        let c1 = CircleConstraint::new(p(0., 0.), 0.0).unwrap();
        let c2 = CircleConstraint::new(p(4., 0.), 2.0).unwrap();
        let seg = Segment::new(p(0., 0.), p(4., 0.)).unwrap();
        let hits = covering_bisector_hits(&c1, &c2, &seg).unwrap();
        assert_eq!(hits.len(), 1);
        assert!((hits[0].t - 0.75).abs() < 1e-12, "{:?}", hits);
    }

    #[test]
    fn bisector_dominated_everywhere() {
        let c1 = CircleConstraint::new(p(0., 0.), 2.0).unwrap();
        let c2 = CircleConstraint::new(p(1., 0.), 0.0).unwrap();
        for seg in [
            Segment::new(p(-5., -3.), p(7., 2.)).unwrap(),
            Segment::new(p(1., 0.), p(1., 1.)).unwrap(),
        ] {
            assert!(covering_bisector_hits(&c1, &c2, &seg).unwrap().is_empty());
            assert_eq!(smaller_at(&c1, &c2, seg.at(0.3)), Which::Second);
        }
    }

    #[test]
    fn bisector_identical_and_coincident() {
        let c = CircleConstraint::new(p(1., 1.), 0.5).unwrap();
        let seg = Segment::new(p(0., 0.), p(1., 0.)).unwrap();
        assert_eq!(
            covering_bisector_hits(&c, &c, &seg),
            Err(GeomError::IdenticalConstraints)
        );
        let big = CircleConstraint::new(p(1., 1.), 0.9).unwrap();
        assert!(covering_bisector_hits(&c, &big, &seg).unwrap().is_empty());
        // The segment lies on the perpendicular bisector of the anchors.
        let c1 = CircleConstraint::new(p(-1., 0.), 0.0).unwrap();
        let c2 = CircleConstraint::new(p(1., 0.), 0.0).unwrap();
        let vert = Segment::new(p(0., -1.), p(0., 1.)).unwrap();
        assert_eq!(
            covering_bisector_hits(&c1, &c2, &vert),
            Err(GeomError::CoincidentOnSegment)
        );
    }

    #[test]
    fn bisector_two_hits() {
        // Hyperbola branch |x-q1| - |x-q2| = 1 crossed twice by a horizontal line.
        let c1 = CircleConstraint::new(p(-2., 0.), 0.0).unwrap();
        let c2 = CircleConstraint::new(p(2., 0.), 1.0).unwrap();
        let seg = Segment::new(p(-10., 3.), p(10., 3.)).unwrap();
        let hits = covering_bisector_hits(&c1, &c2, &seg).unwrap();
        assert_eq!(hits.len(), 1, "only one branch exists: {hits:?}");
        let vseg = Segment::new(p(1.0, -10.), p(1.0, 10.)).unwrap();
        let vhits = covering_bisector_hits(&c1, &c2, &vseg).unwrap();
        assert_eq!(vhits.len(), 2, "{vhits:?}");
        assert_ne!(vhits[0].smaller_below, vhits[1].smaller_below);
    }

    #[test]
    fn rotation_examples() {
        let r = Rotation::new(Point::default(), std::f64::consts::FRAC_PI_2);
        let q = r.apply(p(1., 0.));
        assert!((q.x).abs() < 1e-15 && (q.y - 1.0).abs() < 1e-15);
        let line = DirectedLine::through(p(0., 0.), p(1., 1.)).unwrap();
        let lev = Rotation::leveling(&line);
        assert!((lev.angle + std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!(lev.apply_line(&line).slope_angle().abs() < 1e-15);
    }

    #[test]
    fn cone_tracks_span() {
        let mut c = DirectionCone::empty();
        c.insert(p(1., 0.));
        c.insert(p(0., 1.));
        assert!(!c.full);
        assert!((c.span - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let b = c.bisector().unwrap();
        assert!((b.x - b.y).abs() < 1e-12 && b.x > 0.0);
        c.insert(p(1., -1.));
        assert!((c.span - 0.75 * std::f64::consts::PI).abs() < 1e-12);
        c.insert(p(-1., 0.1));
        assert!(c.full);
        let mut opp = DirectionCone::empty();
        opp.insert(p(0., 1.));
        opp.insert(p(0., -1.));
        assert!(opp.full);
    }

    fn coord() -> impl Strategy<Value = f64> {
        -10.0f64..10.0
    }

    fn pt() -> impl Strategy<Value = Point> {
        (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn orient_antisymmetric(a in pt(), b in pt(), c in pt()) {
            let s = orient(a, b, c);
            prop_assert_eq!(orient(b, a, c), -s);
            prop_assert_eq!(orient(a, c, b), -s);
            prop_assert_eq!(orient(c, b, a), -s);
        }

        #[test]
        fn bisector_hits_satisfy_equation_and_dominance(
            q1 in pt(), q2 in pt(), f1 in 0.0f64..5.0, f2 in 0.0f64..5.0,
            a in pt(), b in pt(),
        ) {
            prop_assume!(a.dist(b) > 1e-3);
            let c1 = CircleConstraint::new(q1, f1).unwrap();
            let c2 = CircleConstraint::new(q2, f2).unwrap();
            let seg = Segment::new(a, b).unwrap();
            let hits = match covering_bisector_hits(&c1, &c2, &seg) {
                Ok(h) => h,
                Err(_) => return Ok(()),
            };
            for h in &hits {
                let x = seg.at(h.t);
                prop_assert!((c1.value(x) - c2.value(x)).abs() <= 1e-8);
            }
            // Between consecutive breakpoints the sign of the difference is constant
            // and matches the annotation of the following hit.
            let mut bounds = vec![0.0];
            bounds.extend(hits.iter().map(|h| h.t));
            bounds.push(1.0);
            for w in bounds.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                if hi - lo < 1e-6 { continue; }
                let mut signs = Vec::new();
                for k in 1..8 {
                    let t = lo + (hi - lo) * k as f64 / 8.0;
                    match smaller_at(&c1, &c2, seg.at(t)) {
                        Which::Tie => {}
                        w => signs.push(w),
                    }
                }
                signs.dedup();
                prop_assert!(signs.len() <= 1, "sign change without hit: {:?} {:?}", hits, signs);
                if let (Some(&s), Some(h)) = (signs.first(), hits.iter().find(|h| h.t == hi)) {
                    if h.smaller_below != Which::Tie {
                        prop_assert_eq!(s, h.smaller_below);
                    }
                }
            }
        }

        #[test]
        fn rotation_inverse_is_identity(q in pt(), piv in pt(), ang in -7.0f64..7.0) {
            let r = Rotation::new(piv, ang);
            let back = r.inverse().apply(r.apply(q));
            prop_assert!(back.dist(q) <= 1e-12 * (1.0 + q.norm() + piv.norm()));
        }
    }
}
