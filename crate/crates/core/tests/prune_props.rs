use geocenter::chord_center::{constrained_geodesic_center, SolverConfig};
use geocenter::gen::{self, Shape};
use geocenter::prune::{approx_median, replay_level, LevelDecision, PairOutcome, Window};
use geocenter::spt::FunnelProvider;
use geocenter::workspace::{BudgetPolicy, Meter, WorkspaceBudget};
use geocenter::Segment;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn values() -> impl Strategy<Value = Vec<f64>> {
    // Small integer range forces plenty of ties.
    (1usize..40).prop_flat_map(|k| prop::collection::vec((0..k as i32).prop_map(f64::from), 0..300))
}

fn window() -> impl Strategy<Value = Window> {
    (-5.0f64..45.0, 0.0f64..60.0).prop_map(|(lo, w)| Window::new(lo, lo + w))
}

/// The pairing rule used in the replay suites: a draw when the two values
/// straddle the window midpoint, otherwise the larger one advances.
fn rule(a: &i64, b: &i64, d: &LevelDecision) -> PairOutcome {
    let LevelDecision::Chord { window } = d else {
        unreachable!()
    };
    let (x, y) = (*a as f64, *b as f64);
    if (x - window.mid()) * (y - window.mid()) < 0.0 {
        PairOutcome::Draw
    } else if a >= b {
        PairOutcome::KeepFirst
    } else {
        PairOutcome::KeepSecond
    }
}

/// Materialized reference for one level.
fn level(v: &[i64], d: &LevelDecision) -> Vec<i64> {
    let mut out = Vec::new();
    for pair in v.chunks(2) {
        match pair {
            [a, b] => match rule(a, b, d) {
                PairOutcome::KeepFirst => out.push(*a),
                PairOutcome::KeepSecond => out.push(*b),
                PairOutcome::Draw => out.extend([*a, *b]),
            },
            [a] => out.push(*a),
            _ => unreachable!(),
        }
    }
    out
}

fn trace() -> impl Strategy<Value = Vec<LevelDecision>> {
    prop::collection::vec(
        (-100.0f64..100.0, 0.0f64..50.0).prop_map(|(lo, w)| LevelDecision::Chord {
            window: Window::new(lo, lo + w),
        }),
        0..12,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn median_rank_is_central(data in values(), w in window(), seed in any::<u64>()) {
        let meter = Meter::unbounded(64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inside: Vec<f64> = data.iter().copied().filter(|&x| w.contains(x)).collect();
        let got = approx_median(|| Ok(data.iter().copied()), w, &mut rng, &meter);
        if inside.is_empty() {
            prop_assert!(got.is_err());
            return Ok(());
        }
        let med = got.unwrap();
        prop_assert_eq!(med.count, inside.len());
        prop_assert!(med.attempts >= 1);
        prop_assert!(inside.contains(&med.value));
        let lt = inside.iter().filter(|&&x| x < med.value).count();
        let le = inside.iter().filter(|&&x| x <= med.value).count();
        // Some copy of the value sits at a rank in [m/4, 3m/4].
        prop_assert!(4 * lt <= 3 * inside.len() && 4 * le >= inside.len(), "lt={lt} le={le} m={}", inside.len());
    }

    #[test]
    fn replay_matches_materialized_levels(raw in prop::collection::vec(-100i64..100, 0..200), levels in trace()) {
        let mut expect = raw.clone();
        for d in &levels {
            expect = level(&expect, d);
        }
        let r: &dyn Fn(&i64, &i64, &LevelDecision) -> PairOutcome = &rule;
        let got: Vec<i64> = replay_level(Box::new(raw.iter().copied()), &levels, r).collect();
        prop_assert_eq!(&got, &expect);
        let again: Vec<i64> = replay_level(Box::new(raw.iter().copied()), &levels, r).collect();
        prop_assert_eq!(got, again);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn median_does_not_depend_on_cache(data in values(), w in window(), seed in any::<u64>()) {
        let run = |meter: &Meter| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..4)
                .map(|_| approx_median(|| Ok(data.iter().copied()), w, &mut rng, meter).ok())
                .collect::<Vec<_>>()
        };
        let big = Meter::unbounded(64);
        let tiny = Meter::new(WorkspaceBudget::new(1, BudgetPolicy::Record), 64);
        prop_assert_eq!(run(&big), run(&tiny));
    }

    #[test]
    fn decisive_levels_halve(raw in prop::collection::vec(-100i64..100, 0..300), depth in 0usize..10) {
        let d = LevelDecision::Chord { window: Window::new(1e9, 2e9) };
        let r: &dyn Fn(&i64, &i64, &LevelDecision) -> PairOutcome = &rule;
        let got = replay_level(Box::new(raw.iter().copied()), &vec![d; depth], r).count();
        let mut want = raw.len();
        for _ in 0..depth {
            want = want.div_ceil(2);
        }
        prop_assert_eq!(got, want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Each tournament level removes a constant fraction of the circles, so
    /// the trace (and with it the stored state) stays logarithmic.
    #[test]
    fn segment_tournament_decays_geometrically(seed in any::<u64>(), n in 8usize..160) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = gen::random(&mut rng, Shape::Star, n);
        let n = poly.len();
        let (lo, hi) = poly.bbox();
        let mid = lo.lerp(hi, 0.5);
        let Some(seg) = (0..64).find_map(|_| {
            let a = mid.lerp(poly.vertex(rng.gen_range(0..n)), 0.9);
            let b = mid.lerp(poly.vertex(rng.gen_range(0..n)), 0.9);
            (poly.segment_inside(a, b)).then(|| Segment::new(a, b).ok()).flatten()
        }) else {
            return Ok(());
        };
        let prov = FunnelProvider::new(&poly);
        let meter = Meter::unbounded(n);
        let cfg = SolverConfig::default();
        let c = constrained_geodesic_center(&prov, &seg, &mut rng, &meter, &cfg).unwrap();
        let report = meter.report();
        let bound = ((n as f64).ln() / (16.0f64 / 15.0).ln()).ceil() as usize + 8;
        prop_assert!(c.trace.len() <= bound, "{} levels for n={n}", c.trace.len());
        if report.levels_recorded > 0 {
            prop_assert!(report.mean_level_decay <= 15.0 / 16.0, "decay {}", report.mean_level_decay);
        }
    }
}
