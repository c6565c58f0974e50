//! Metered execution for the bounded-workspace model.
//!
//! The input polygon is only ever borrowed immutably. Every writable word the
//! core algorithm keeps alive is charged to a [`Meter`] through an RAII
//! [`Charge`]; the shortest-path-tree provider charges its own counter.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multiplier in the enforced bound `peak_core_words <= C * (s + ceil(log2 n))`.
pub const ENFORCE_CONSTANT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BudgetPolicy {
    /// Fail with [`Error::BudgetExceeded`] as soon as the bound is crossed.
    Enforce,
    /// Only record the peak.
    Record,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkspaceBudget {
    pub s: usize,
    pub policy: BudgetPolicy,
}

impl WorkspaceBudget {
    pub fn new(s: usize, policy: BudgetPolicy) -> Self {
        Self {
            s: s.max(1),
            policy,
        }
    }

    /// `max(ceil(log2 n), 8)`.
    pub fn default_for(n: usize) -> Self {
        Self::new(ceil_log2(n).max(8), BudgetPolicy::Enforce)
    }
}

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceReport {
    pub s: usize,
    pub n: usize,
    pub limit_words: usize,
    pub peak_core_words: usize,
    pub peak_provider_words: usize,
    pub spt_replays: u64,
    pub elements_streamed: u64,
    pub median_calls: u64,
    pub median_attempts: u64,
    pub cache_hits: u64,
    pub pruning_checks: u64,
    pub pruning_violations: u64,
    /// Active-count ratios of successive tournament levels, averaged.
    pub mean_level_decay: f64,
    pub levels_recorded: u64,
}

/// Word counters for one run. Single-threaded by construction (`Cell`).
#[derive(Debug)]
pub struct Meter {
    budget: WorkspaceBudget,
    n: usize,
    limit: usize,
    core: Cell<usize>,
    peak_core: Cell<usize>,
    provider: Cell<usize>,
    peak_provider: Cell<usize>,
    cache: Cell<usize>,
    spt_replays: Cell<u64>,
    elements: Cell<u64>,
    median_calls: Cell<u64>,
    median_attempts: Cell<u64>,
    cache_hits: Cell<u64>,
    pruning_checks: Cell<u64>,
    pruning_violations: Cell<u64>,
    decay_sum: Cell<f64>,
    decay_count: Cell<u64>,
}

impl Meter {
    pub fn new(budget: WorkspaceBudget, n: usize) -> Self {
        let limit = ENFORCE_CONSTANT * (budget.s + ceil_log2(n));
        Self {
            budget,
            n,
            limit,
            core: Cell::new(0),
            peak_core: Cell::new(0),
            provider: Cell::new(0),
            peak_provider: Cell::new(0),
            cache: Cell::new(0),
            spt_replays: Cell::new(0),
            elements: Cell::new(0),
            median_calls: Cell::new(0),
            median_attempts: Cell::new(0),
            cache_hits: Cell::new(0),
            pruning_checks: Cell::new(0),
            pruning_violations: Cell::new(0),
            decay_sum: Cell::new(0.0),
            decay_count: Cell::new(0),
        }
    }

    /// An unbounded meter for standalone use of the streaming operations.
    pub fn unbounded(n: usize) -> Self {
        Self::new(WorkspaceBudget::new(n.max(1), BudgetPolicy::Record), n)
    }

    pub fn budget(&self) -> WorkspaceBudget {
        self.budget
    }

    pub fn s(&self) -> usize {
        self.budget.s
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn core_words(&self) -> usize {
        self.core.get()
    }

    /// Reserve `words` core words until the returned guard is dropped.
    pub fn charge(&self, words: usize) -> Result<Charge<'_>> {
        let used = self.core.get() + words;
        self.core.set(used);
        if used > self.peak_core.get() {
            self.peak_core.set(used);
        }
        if self.budget.policy == BudgetPolicy::Enforce && used > self.limit {
            self.core.set(used - words);
            return Err(Error::BudgetExceeded {
                used,
                limit: self.limit,
            });
        }
        Ok(Charge {
            meter: self,
            words,
            cache: false,
        })
    }

    /// Words still available for replay caches. Caches may hold at most `s`
    /// words in total.
    pub fn cache_room(&self) -> usize {
        self.budget.s.saturating_sub(self.cache.get())
    }

    /// Reserve cache words if they fit in the remaining cache room.
    pub fn try_charge_cache(&self, words: usize) -> Result<Option<Charge<'_>>> {
        if words > self.cache_room() {
            return Ok(None);
        }
        let mut c = self.charge(words)?;
        c.cache = true;
        self.cache.set(self.cache.get() + words);
        Ok(Some(c))
    }

    /// Provider-side memory, outside the core contract.
    pub fn charge_provider(&self, words: usize) -> ProviderCharge<'_> {
        let used = self.provider.get() + words;
        self.provider.set(used);
        if used > self.peak_provider.get() {
            self.peak_provider.set(used);
        }
        ProviderCharge { meter: self, words }
    }

    pub fn count_replay(&self) {
        self.spt_replays.set(self.spt_replays.get() + 1);
    }

    pub fn count_elements(&self, k: u64) {
        self.elements.set(self.elements.get() + k);
    }

    pub fn count_cache_hit(&self) {
        self.cache_hits.set(self.cache_hits.get() + 1);
    }

    pub fn count_median(&self, attempts: u64) {
        self.median_calls.set(self.median_calls.get() + 1);
        self.median_attempts
            .set(self.median_attempts.get() + attempts);
    }

    pub fn count_pruning_check(&self, violated: bool) {
        self.pruning_checks.set(self.pruning_checks.get() + 1);
        if violated {
            self.pruning_violations
                .set(self.pruning_violations.get() + 1);
        }
    }

    pub fn record_level_decay(&self, before: usize, after: usize) {
        if before > 0 {
            self.decay_sum
                .set(self.decay_sum.get() + after as f64 / before as f64);
            self.decay_count.set(self.decay_count.get() + 1);
        }
    }

    pub fn spt_replays(&self) -> u64 {
        self.spt_replays.get()
    }

    pub fn report(&self) -> WorkspaceReport {
        let dc = self.decay_count.get();
        WorkspaceReport {
            s: self.budget.s,
            n: self.n,
            limit_words: self.limit,
            peak_core_words: self.peak_core.get(),
            peak_provider_words: self.peak_provider.get(),
            spt_replays: self.spt_replays.get(),
            elements_streamed: self.elements.get(),
            median_calls: self.median_calls.get(),
            median_attempts: self.median_attempts.get(),
            cache_hits: self.cache_hits.get(),
            pruning_checks: self.pruning_checks.get(),
            pruning_violations: self.pruning_violations.get(),
            mean_level_decay: if dc > 0 {
                self.decay_sum.get() / dc as f64
            } else {
                0.0
            },
            levels_recorded: dc,
        }
    }
}

/// Core words held until drop.
#[derive(Debug)]
pub struct Charge<'m> {
    meter: &'m Meter,
    words: usize,
    cache: bool,
}

impl Charge<'_> {
    pub fn words(&self) -> usize {
        self.words
    }
}

impl Drop for Charge<'_> {
    fn drop(&mut self) {
        self.meter.core.set(self.meter.core.get() - self.words);
        if self.cache {
            self.meter.cache.set(self.meter.cache.get() - self.words);
        }
    }
}

#[derive(Debug)]
pub struct ProviderCharge<'m> {
    meter: &'m Meter,
    words: usize,
}

impl Drop for ProviderCharge<'_> {
    fn drop(&mut self) {
        self.meter
            .provider
            .set(self.meter.provider.get() - self.words);
    }
}

/// Run `task` under a fresh meter and return its result with the report.
pub fn with_budget<T>(
    budget: WorkspaceBudget,
    n: usize,
    task: impl FnOnce(&Meter) -> Result<T>,
) -> Result<(T, WorkspaceReport)> {
    let meter = Meter::new(budget, n);
    let out = task(&meter)?;
    Ok((out, meter.report()))
}
