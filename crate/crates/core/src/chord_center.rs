//! Geodesic center constrained to a segment inside the polygon.
//!
//! First the segment is narrowed, by randomized binary search over the
//! points where lines through tree edges cross it, to a piece on which the
//! shortest path tree is combinatorially fixed. On that piece the radius is
//! the upper envelope of the root-child circles, which are then pruned by a
//! tournament whose levels are regenerated by replay.

use arrayvec::ArrayVec;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{
    ccw_angle, covering_bisector_hits, smaller_at, unimodal_min, CircleConstraint, DirectionCone,
    Point, Segment, Which,
};
use crate::prune::{
    approx_median, replay_level, DecisionTrace, LevelDecision, PairOutcome, Window,
};
use crate::spt::{farthest_cone, geodesic_radius, root_child_circles, RootCircle, SptProvider};
use crate::workspace::{Charge, Meter};

/// Active circles at or below this count are handled directly.
pub const BASE_CASE: usize = 24;

/// Samples per pruned pair when pruning checks are on.
pub const PRUNING_SAMPLES: usize = 100;

const CIRCLE_WORDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Relative tolerance for ties and zero projections.
    pub eps: f64,
    /// Verify every pruning decision by sampling (slow; for testing).
    pub check_pruning: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps: crate::geom::DEFAULT_EPS,
            check_pruning: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SideValue {
    Optimal,
    MoveTowardB,
    MoveTowardA,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SideDecision {
    pub value: SideValue,
    /// Radius at the probe.
    pub radius: f64,
    /// Smallest and largest projection of a farthest direction on the
    /// segment direction.
    pub min_projection: f64,
    pub max_projection: f64,
}

fn classify(pmin: f64, pmax: f64, eps: f64) -> SideValue {
    if pmin > eps {
        SideValue::MoveTowardB
    } else if pmax < -eps {
        SideValue::MoveTowardA
    } else {
        SideValue::Optimal
    }
}

/// Extreme projections of the directions in a cone onto `dir`.
fn cone_projections(cone: &DirectionCone, dir: Point) -> (f64, f64) {
    if cone.full {
        return (-1.0, 1.0);
    }
    let (a, b) = (cone.start.dot(dir), cone.end.dot(dir));
    let mut lo = a.min(b);
    let mut hi = a.max(b);
    if ccw_angle(cone.start, dir) <= cone.span {
        hi = 1.0;
    }
    if ccw_angle(cone.start, -dir) <= cone.span {
        lo = -1.0;
    }
    (lo, hi)
}

/// Which way along `seg_dir` the radius decreases at `x`, from the first
/// directions of the shortest paths to the farthest vertices.
pub fn chord_side_test(
    provider: &dyn SptProvider,
    x: Point,
    seg_dir: Point,
    eps: f64,
    meter: &Meter,
) -> Result<SideDecision> {
    let far = farthest_cone(provider, x, eps, meter)?;
    let (pmin, pmax) = cone_projections(&far.cone, seg_dir);
    Ok(SideDecision {
        value: classify(pmin, pmax, eps),
        radius: far.distance,
        min_projection: pmin,
        max_projection: pmax,
    })
}

/// Parameters where lines through edges of the trees rooted at both segment
/// endpoints cross the segment.
pub fn intersection_stream<'a>(
    provider: &'a dyn SptProvider,
    seg: Segment,
    meter: &'a Meter,
) -> Result<impl Iterator<Item = f64> + 'a> {
    let a = provider.stream(seg.a, meter)?;
    let b = provider.stream(seg.b, meter)?;
    Ok(a.chain(b).filter_map(move |e| {
        seg.line_hit(e.parent_point, e.child_point)
            .filter(|t| (0.0..=1.0).contains(t))
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChordInterval {
    pub host: Segment,
    pub t_lo: f64,
    pub t_hi: f64,
    /// In-window structure points at the last median step.
    pub m_estimate: usize,
}

impl ChordInterval {
    pub fn is_point(&self) -> bool {
        self.t_lo == self.t_hi
    }
}

/// Narrow `seg` to a piece with no intersection point strictly inside, on
/// which the shortest path tree does not change.
pub fn stable_subinterval(
    provider: &dyn SptProvider,
    seg: &Segment,
    rng: &mut impl Rng,
    meter: &Meter,
    cfg: &SolverConfig,
) -> Result<ChordInterval> {
    let _w = meter.charge(8)?;
    let dir = seg.direction();
    let mut w = Window::new(0.0, 1.0);
    let mut m_estimate = 0;
    // In-window crossings in stream order, once they fit in the cache room.
    let mut cached: Option<(Vec<f64>, Charge)> = None;
    loop {
        if cached.is_none() && m_estimate > 0 && m_estimate <= meter.cache_room() {
            if let Some(c) = meter.try_charge_cache(m_estimate)? {
                let v: Vec<f64> = intersection_stream(provider, *seg, meter)?
                    .filter(|&t| w.contains(t))
                    .collect();
                cached = Some((v, c));
            }
        }
        let med = match &mut cached {
            Some((v, _)) => {
                v.retain(|&t| w.contains(t));
                meter.count_cache_hit();
                approx_median(|| Ok(v.iter().copied()), w, rng, meter)
            }
            None => approx_median(|| intersection_stream(provider, *seg, meter), w, rng, meter),
        };
        let med = match med {
            Ok(m) => m,
            Err(Error::Empty(_)) => break,
            Err(e) => return Err(e),
        };
        m_estimate = med.count;
        let t = med.value;
        match chord_side_test(provider, seg.at(t), dir, cfg.eps, meter)?.value {
            SideValue::Optimal => {
                return Ok(ChordInterval {
                    host: *seg,
                    t_lo: t,
                    t_hi: t,
                    m_estimate,
                })
            }
            SideValue::MoveTowardB => w.lo = t,
            SideValue::MoveTowardA => w.hi = t,
        }
    }
    Ok(ChordInterval {
        host: *seg,
        t_lo: w.lo,
        t_hi: w.hi,
        m_estimate,
    })
}

fn g_value(circles: &[CircleConstraint], x: Point) -> f64 {
    circles
        .iter()
        .map(|c| c.value(x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Exact minimum of the upper envelope of a few circles over `[lo, hi]`.
///
/// The minimizer is a window end, the foot of some anchor on the segment, or
/// a point where two circles agree; all are tried.
pub fn base_case_segment(
    circles: &[CircleConstraint],
    seg: &Segment,
    lo: f64,
    hi: f64,
) -> (f64, f64) {
    let mut best = (lo, g_value(circles, seg.at(lo)));
    let mut consider = |t: f64| {
        if t >= lo && t <= hi {
            let v = g_value(circles, seg.at(t));
            if v < best.1 {
                best = (t, v);
            }
        }
    };
    consider(hi);
    for (i, c) in circles.iter().enumerate() {
        consider(seg.project(c.anchor).clamp(lo, hi));
        for d in &circles[i + 1..] {
            if let Ok(hits) = covering_bisector_hits(c, d, seg) {
                for h in hits {
                    consider(h.t);
                }
            }
        }
    }
    best
}

/// Result of minimizing a circle envelope along a segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentOptimum {
    pub t: f64,
    pub point: Point,
    pub radius: f64,
    pub trace: DecisionTrace,
    /// Final window, containing `t`.
    pub window: Window,
}

pub type CircleStream<'a> = Box<dyn Iterator<Item = RootCircle> + 'a>;

/// Replayable source of circles.
pub trait CircleSource {
    fn circles(&self) -> Result<CircleStream<'_>>;
}

/// The root-child circles of the tree at a fixed point.
pub struct TreeCircles<'a> {
    pub provider: &'a dyn SptProvider,
    pub root: Point,
    pub meter: &'a Meter,
}

impl CircleSource for TreeCircles<'_> {
    fn circles(&self) -> Result<CircleStream<'_>> {
        Ok(Box::new(root_child_circles(
            self.provider,
            self.root,
            self.meter,
        )?))
    }
}

/// A fixed slice of circles (used by tests and by the oracle comparisons).
pub struct SliceCircles<'a>(pub &'a [RootCircle]);

impl CircleSource for SliceCircles<'_> {
    fn circles(&self) -> Result<CircleStream<'_>> {
        Ok(Box::new(self.0.iter().copied()))
    }
}

/// Consecutive pairs of a stream; a trailing odd element is dropped.
fn pairs<T>(mut it: impl Iterator<Item = T>) -> impl Iterator<Item = (T, T)> {
    std::iter::from_fn(move || {
        let a = it.next()?;
        let b = it.next()?;
        Some((a, b))
    })
}

/// Side test from the circles alone: directions towards the anchors of the
/// circles attaining the envelope at `x`, projected on `dir`.
pub(crate) fn envelope_side(
    stream: CircleStream<'_>,
    x: Point,
    dir: Point,
    tol: f64,
    eps: f64,
) -> SideDecision {
    let mut best = f64::NEG_INFINITY;
    let (mut pmin, mut pmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in stream {
        let v = c.circle.value(x);
        if v > best + tol {
            best = v;
            pmin = f64::INFINITY;
            pmax = f64::NEG_INFINITY;
        }
        if v >= best - tol {
            best = best.max(v);
            let p = (c.circle.anchor - x)
                .normalized()
                .map_or(0.0, |u| u.dot(dir));
            pmin = pmin.min(p);
            pmax = pmax.max(p);
        }
    }
    SideDecision {
        value: classify(pmin, pmax, eps),
        radius: best,
        min_projection: pmin,
        max_projection: pmax,
    }
}

/// Envelope value at `x` and the cone of directions towards the anchors of
/// the circles attaining it.
pub(crate) fn envelope_cone(stream: CircleStream<'_>, x: Point, tol: f64) -> (f64, DirectionCone) {
    let mut best = f64::NEG_INFINITY;
    let mut cone = DirectionCone::empty();
    for c in stream {
        let v = c.circle.value(x);
        if v > best + tol {
            best = v;
            cone = DirectionCone::empty();
        }
        if v >= best - tol {
            best = best.max(v);
            cone.insert(c.circle.anchor - x);
        }
    }
    (best, cone)
}

type Rule<'s> = Box<dyn Fn(&RootCircle, &RootCircle, &LevelDecision) -> PairOutcome + 's>;

fn pair_rule<'s>(seg: Segment, cfg: SolverConfig, meter: &'s Meter) -> Rule<'s> {
    Box::new(move |a, b, d| {
        let LevelDecision::Chord { window } = d else {
            return PairOutcome::Draw;
        };
        let hits = match covering_bisector_hits(&a.circle, &b.circle, &seg) {
            Ok(h) => h,
            Err(_) => return PairOutcome::KeepFirst,
        };
        if hits.iter().any(|h| window.contains(h.t)) {
            return PairOutcome::Draw;
        }
        let out = match smaller_at(&a.circle, &b.circle, seg.at(window.mid())) {
            Which::First => PairOutcome::KeepSecond,
            Which::Second | Which::Tie => PairOutcome::KeepFirst,
        };
        if cfg.check_pruning {
            let (win, lose) = match out {
                PairOutcome::KeepFirst => (a, b),
                _ => (b, a),
            };
            let violated = (0..PRUNING_SAMPLES).any(|k| {
                let t = window.lo + window.width() * (k as f64 + 0.5) / PRUNING_SAMPLES as f64;
                let x = seg.at(t);
                lose.circle.value(x) > win.circle.value(x) + 1e-9
            });
            meter.count_pruning_check(violated);
        }
        out
    })
}

struct Tournament<'s, S: CircleSource + ?Sized> {
    source: &'s S,
    seg: Segment,
    meter: &'s Meter,
    cfg: SolverConfig,
    tol: f64,
    rule: Rule<'s>,
    trace: DecisionTrace,
    trace_words: Vec<Charge<'s>>,
    /// A materialized level and the number of trace levels baked into it.
    cached: Option<(Vec<RootCircle>, usize, Charge<'s>)>,
}

impl<'s, S: CircleSource + ?Sized> Tournament<'s, S> {
    fn level(&self) -> Result<CircleStream<'_>> {
        let (base, from): (CircleStream<'_>, usize) = match &self.cached {
            Some((v, from, _)) => {
                self.meter.count_cache_hit();
                (Box::new(v.iter().copied()), *from)
            }
            None => (self.source.circles()?, 0),
        };
        Ok(replay_level(base, &self.trace.levels[from..], &*self.rule))
    }

    fn count(&self) -> Result<usize> {
        Ok(self.level()?.count())
    }

    /// Keep the current level in memory if it fits in the cache room.
    fn try_cache(&mut self, m: usize) -> Result<()> {
        let words = CIRCLE_WORDS * m;
        let held = self.cached.as_ref().map_or(0, |(_, _, c)| c.words());
        if words > held + self.meter.cache_room() {
            return Ok(());
        }
        let v: Vec<RootCircle> = self.level()?.collect();
        self.cached = None;
        if let Some(c) = self.meter.try_charge_cache(words)? {
            self.cached = Some((v, self.trace.len(), c));
        }
        Ok(())
    }

    fn hits_in(&self, j: Window) -> Result<impl Iterator<Item = f64> + '_> {
        let seg = self.seg;
        Ok(pairs(self.level()?).flat_map(move |(a, b)| {
            covering_bisector_hits(&a.circle, &b.circle, &seg)
                .map(|h| {
                    h.into_iter()
                        .map(|h| h.t)
                        .filter(|&t| j.contains(t))
                        .collect::<ArrayVec<f64, 2>>()
                })
                .unwrap_or_default()
        }))
    }

    fn side(&self, t: f64) -> Result<SideDecision> {
        Ok(envelope_side(
            self.level()?,
            self.seg.at(t),
            self.seg.direction(),
            self.tol,
            self.cfg.eps,
        ))
    }

    fn push(&mut self, window: Window) -> Result<()> {
        self.trace_words
            .push(self.meter.charge(LevelDecision::WORDS)?);
        self.trace.push(LevelDecision::Chord { window });
        Ok(())
    }
}

/// Minimize `max_i |x(t) - q_i| + f_i` over `t` in `[window.lo, window.hi]`,
/// streaming the circles from `source`.
pub fn minimize_on_segment<S: CircleSource + ?Sized>(
    source: &S,
    seg: &Segment,
    window: Window,
    scale: f64,
    rng: &mut impl Rng,
    meter: &Meter,
    cfg: &SolverConfig,
) -> Result<SegmentOptimum> {
    let _w = meter.charge(16)?;
    let mut tour = Tournament {
        source,
        seg: *seg,
        meter,
        cfg: *cfg,
        tol: cfg.eps * scale,
        rule: pair_rule(*seg, *cfg, meter),
        trace: DecisionTrace::new(),
        trace_words: Vec::new(),
        cached: None,
    };
    let mut j = window;
    let mut m = tour.count()?;
    if m == 0 {
        return Err(Error::Empty("no circles"));
    }
    tour.try_cache(m)?;
    let mut stalls = 0;
    let mut optimal: Option<f64> = None;
    'levels: while m > BASE_CASE {
        // Two median steps, each followed by a side test, shrink the window.
        for _ in 0..2 {
            let med = match approx_median(|| tour.hits_in(j), j, rng, meter) {
                Ok(med) => med,
                Err(Error::Empty(_)) => break,
                Err(e) => return Err(e),
            };
            match tour.side(med.value)?.value {
                SideValue::Optimal => {
                    optimal = Some(med.value);
                    break 'levels;
                }
                SideValue::MoveTowardB => j.lo = med.value,
                SideValue::MoveTowardA => j.hi = med.value,
            }
        }
        tour.push(j)?;
        let next = tour.count()?;
        meter.record_level_decay(m, next);
        if next >= m {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        } else {
            stalls = 0;
        }
        m = next;
        tour.try_cache(m)?;
    }

    let t = if let Some(t) = optimal {
        t
    } else if m <= BASE_CASE {
        let _c = meter.charge(CIRCLE_WORDS * m)?;
        let circles: Vec<CircleConstraint> = tour.level()?.map(|c| c.circle).collect();
        base_case_segment(&circles, seg, j.lo, j.hi).0
    } else {
        // No progress: the envelope is still convex, search it directly.
        let g = |t: f64| -> f64 {
            let x = seg.at(t);
            tour.level()
                .map(|s| {
                    s.map(|c| c.circle.value(x))
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .unwrap_or(f64::INFINITY)
        };
        unimodal_min(j.lo, j.hi, 1e-12, g).0
    };
    let point = seg.at(t);
    let radius = source
        .circles()?
        .map(|c| c.circle.value(point))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SegmentOptimum {
        t,
        point,
        radius,
        trace: tour.trace.clone(),
        window: j,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstrainedCenter {
    pub t: f64,
    pub point: Point,
    pub radius: f64,
    pub interval: ChordInterval,
    pub trace: DecisionTrace,
}

/// The point of `seg` minimizing the geodesic radius.
pub fn constrained_geodesic_center(
    provider: &dyn SptProvider,
    seg: &Segment,
    rng: &mut impl Rng,
    meter: &Meter,
    cfg: &SolverConfig,
) -> Result<ConstrainedCenter> {
    let iv = stable_subinterval(provider, seg, rng, meter, cfg)?;
    if iv.is_point() {
        let point = seg.at(iv.t_lo);
        return Ok(ConstrainedCenter {
            t: iv.t_lo,
            point,
            radius: geodesic_radius(provider, point, meter)?,
            interval: iv,
            trace: DecisionTrace::new(),
        });
    }
    let source = TreeCircles {
        provider,
        root: seg.at(0.5 * (iv.t_lo + iv.t_hi)),
        meter,
    };
    let scale = provider.polygon().scale();
    let opt = minimize_on_segment(
        &source,
        seg,
        Window::new(iv.t_lo, iv.t_hi),
        scale,
        rng,
        meter,
        cfg,
    )?;
    Ok(ConstrainedCenter {
        t: opt.t,
        point: opt.point,
        radius: opt.radius,
        interval: iv,
        trace: opt.trace,
    })
}
