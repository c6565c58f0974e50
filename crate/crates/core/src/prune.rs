//! Prune-and-search over replayable streams.
//!
//! Nothing here stores a stream. A stream is a factory that can be invoked
//! again to regenerate the same sequence; levels of a tournament are
//! regenerated from the base stream and an O(1)-word decision per level.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::workspace::Meter;

/// Open window `(lo, hi)` on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub const ALL: Window = Window {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Outcome of an approximate median search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Median {
    pub value: f64,
    /// Number of in-window elements.
    pub count: usize,
    pub attempts: u32,
}

/// An element of rank in `[m/4, 3m/4]` among the in-window elements of a
/// replayable stream.
///
/// Each attempt picks a uniform in-window element by single-element
/// reservoir sampling (one draw per element) and then counts its rank in a
/// second pass. If the in-window elements fit in the free cache room they
/// are kept after the first pass; the random draws are the same either way,
/// so the result does not depend on the cache.
pub fn approx_median<I, F>(
    mut factory: F,
    window: Window,
    rng: &mut impl Rng,
    meter: &Meter,
) -> Result<Median>
where
    F: FnMut() -> Result<I>,
    I: Iterator<Item = f64>,
{
    let _w = meter.charge(6)?;
    let room = meter.cache_room();
    let mut reserve = if room > 0 {
        meter.try_charge_cache(room)?
    } else {
        None
    };
    let mut cache: Option<Vec<f64>> = reserve.as_ref().map(|_| Vec::new());
    let mut attempts = 0u32;
    loop {
        attempts += 1;
        let mut count = 0usize;
        let mut pick = f64::NAN;
        let mut draw = |x: f64, count: &mut usize, pick: &mut f64| {
            *count += 1;
            if rng.gen_range(0..*count) == 0 {
                *pick = x;
            }
        };
        match &mut cache {
            Some(buf) if attempts > 1 => {
                meter.count_cache_hit();
                for &x in buf.iter() {
                    draw(x, &mut count, &mut pick);
                }
            }
            _ => {
                for x in factory()?.filter(|&x| window.contains(x)) {
                    draw(x, &mut count, &mut pick);
                    if let Some(buf) = &mut cache {
                        if buf.len() < room {
                            buf.push(x);
                        } else {
                            cache = None;
                            reserve = None;
                        }
                    }
                }
            }
        }
        if attempts == 1 && reserve.is_some() {
            let len = cache.as_ref().map_or(0, Vec::len);
            // Shrink the reservation to what the cache holds.
            drop(reserve.take());
            reserve = meter.try_charge_cache(len)?;
            if reserve.is_none() {
                cache = None;
            }
        }
        if count == 0 {
            return Err(Error::Empty("no stream element in window"));
        }
        let (mut lt, mut eq) = (0usize, 0usize);
        let mut rank = |x: f64| {
            if x < pick {
                lt += 1;
            } else if x == pick {
                eq += 1;
            }
        };
        match &cache {
            Some(buf) => {
                meter.count_cache_hit();
                buf.iter().for_each(|&x| rank(x));
            }
            None => factory()?.filter(|&x| window.contains(x)).for_each(rank),
        }
        if 4 * lt <= 3 * count && 4 * (lt + eq) >= count {
            meter.count_median(attempts as u64);
            return Ok(Median {
                value: pick,
                count,
                attempts,
            });
        }
    }
}

/// O(1)-word record of one prune level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LevelDecision {
    /// Parameter window on a segment.
    Chord { window: Window },
    /// One line-pruning round: the frame (rotation angle, then shear by
    /// the median slope) and the two cuts in it, with the kept sides as
    /// signs.
    Region {
        angle: f64,
        slope: f64,
        x_cut: f64,
        x_keep: i8,
        y_cut: f64,
        y_keep: i8,
    },
}

impl LevelDecision {
    pub const WORDS: usize = 7;
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecisionTrace {
    pub levels: Vec<LevelDecision>,
}

impl DecisionTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn words(&self) -> usize {
        LevelDecision::WORDS * self.levels.len()
    }

    pub fn push(&mut self, d: LevelDecision) {
        self.levels.push(d);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOutcome {
    KeepFirst,
    KeepSecond,
    Draw,
}

/// One tournament level: consecutive elements are paired and the rule
/// decides which of them advance. A trailing odd element advances.
pub struct Paired<'r, I: Iterator> {
    inner: I,
    decision: LevelDecision,
    rule: &'r dyn Fn(&I::Item, &I::Item, &LevelDecision) -> PairOutcome,
    held: Option<I::Item>,
}

impl<I> Iterator for Paired<'_, I>
where
    I: Iterator,
{
    type Item = I::Item;

    fn next(&mut self) -> Option<I::Item> {
        if let Some(h) = self.held.take() {
            return Some(h);
        }
        let a = self.inner.next()?;
        let Some(b) = self.inner.next() else {
            return Some(a);
        };
        match (self.rule)(&a, &b, &self.decision) {
            PairOutcome::KeepFirst => Some(a),
            PairOutcome::KeepSecond => Some(b),
            PairOutcome::Draw => {
                self.held = Some(b);
                Some(a)
            }
        }
    }
}

/// Active elements after replaying every level of `trace` on a fresh copy
/// of the base stream. Holds one pending element per level.
pub fn replay_level<'a, T: 'a>(
    base: Box<dyn Iterator<Item = T> + 'a>,
    trace: &[LevelDecision],
    rule: &'a dyn Fn(&T, &T, &LevelDecision) -> PairOutcome,
) -> Box<dyn Iterator<Item = T> + 'a> {
    trace.iter().fold(base, |inner, &decision| {
        Box::new(Paired {
            inner,
            decision,
            rule,
            held: None,
        })
    })
}
