use geocenter::center::{geodesic_center, CenterConfig, CenterResult};
use geocenter::gen::{self, Shape};
use geocenter::oracle::VisibilityGraph;
use geocenter::polygon::{point_segment_dist, Polygon};
use geocenter::spt::{farthest_cone, FunnelProvider};
use geocenter::workspace::{ceil_log2, BudgetPolicy, Meter, WorkspaceBudget};
use geocenter::{Point, Rotation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shape_strategy() -> impl Strategy<Value = Shape> {
    prop_oneof![Just(Shape::Convex), Just(Shape::Star), Just(Shape::Comb)]
}

fn polygon(seed: u64, shape: Shape, n: usize) -> Polygon {
    gen::random(&mut ChaCha8Rng::seed_from_u64(seed), shape, n)
}

fn solve(poly: &Polygon, s: usize) -> CenterResult {
    let cfg = CenterConfig {
        budget: WorkspaceBudget::new(s, BudgetPolicy::Enforce),
        ..CenterConfig::for_polygon(poly)
    };
    geodesic_center(poly, &cfg).unwrap()
}

fn diameter(graph: &VisibilityGraph) -> f64 {
    let n = graph.len();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| graph.vertex_dist(i, j))
        .fold(0.0, f64::max)
}

fn unit(angle: f64) -> Point {
    Point::new(angle.cos(), angle.sin())
}

/// Does the ray from boundary point `c` along `u` enter the polygon?
fn enters(poly: &Polygon, c: Point, u: Point, tol: f64) -> Option<bool> {
    if let Some(i) = (0..poly.len()).find(|&i| poly.vertex(i).dist(c) <= tol) {
        return Some(poly.admits(i, u));
    }
    (0..poly.len())
        .map(|i| poly.edge(i))
        .find(|&(a, b)| point_segment_dist(c, a, b) <= tol)
        .map(|(a, b)| (b - a).cross(u) > 1e-6 * (b - a).norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn center_is_locally_optimal(seed in any::<u64>(), shape in shape_strategy(), n in 4usize..60) {
        let poly = polygon(seed, shape, n);
        let graph = VisibilityGraph::new(&poly);
        let r = solve(&poly, ceil_log2(poly.len()).max(8));
        let delta = 1e-5 * diameter(&graph);
        for k in 0..8 {
            let q = r.center + unit(k as f64 * std::f64::consts::FRAC_PI_4) * delta;
            if graph.contains(q) {
                prop_assert!(graph.radius(q) >= r.radius - 1e-9, "{shape:?} step {k}");
            }
        }
    }

    #[test]
    fn no_admissible_descent_at_the_center(seed in any::<u64>(), shape in shape_strategy(), n in 4usize..60) {
        let poly = polygon(seed, shape, n);
        let r = solve(&poly, ceil_log2(poly.len()).max(8));
        let prov = FunnelProvider::new(&poly);
        let m = Meter::unbounded(poly.len());
        let cone = farthest_cone(&prov, r.center, 1e-9, &m).unwrap().cone;
        if cone.full || cone.span >= std::f64::consts::PI - 1e-6 {
            return Ok(());
        }
        // A narrower cone is only optimal on the boundary, where every
        // descent direction must leave the polygon.
        let tol = 1e-9 * poly.scale();
        let enters_at = |u: Point| enters(&poly, r.center, u, tol);
        prop_assert!(enters_at(cone.start).is_some(), "{shape:?} interior center with cone span {}", cone.span);
        let open = std::f64::consts::PI - cone.span;
        for k in 1..32 {
            let a = -std::f64::consts::FRAC_PI_2 + open * (k as f64 / 32.0);
            let u = Rotation::new(Point::default(), a).apply_vec(cone.end);
            prop_assert!(!enters_at(u).unwrap(), "{shape:?} descends along {u:?}");
        }
    }

    #[test]
    fn radius_is_the_true_radius_and_within_diameter_bounds(seed in any::<u64>(), shape in shape_strategy(), n in 4usize..60) {
        let poly = polygon(seed, shape, n);
        let graph = VisibilityGraph::new(&poly);
        let r = solve(&poly, ceil_log2(poly.len()).max(8));
        prop_assert!((graph.radius(r.center) - r.radius).abs() <= 1e-7);
        let d = diameter(&graph);
        prop_assert!(r.radius >= 0.5 * d - 1e-9 && r.radius <= d + 1e-9, "{} vs {d}", r.radius);
    }

    #[test]
    fn chord_recursion_makes_progress(seed in any::<u64>(), shape in shape_strategy(), n in 4usize..200) {
        let poly = polygon(seed, shape, n);
        let r = solve(&poly, ceil_log2(poly.len()).max(8));
        for w in r.chord_counts.windows(2) {
            prop_assert!(w[1] as f64 <= 2.0 / 3.0 * w[0] as f64 + 2.0, "{:?}", r.chord_counts);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn center_does_not_depend_on_s(seed in any::<u64>(), shape in shape_strategy(), n in 8usize..80) {
        let poly = polygon(seed, shape, n);
        let n = poly.len();
        let lg = ceil_log2(n);
        let mut s_values = vec![lg, 4 * lg, (n as f64).sqrt().ceil() as usize, n];
        s_values.sort_unstable();
        let runs: Vec<CenterResult> = s_values.iter().map(|&s| solve(&poly, s)).collect();
        for (s, r) in s_values.iter().zip(&runs) {
            prop_assert!(r.report.peak_core_words <= 64 * (s + lg), "s={s}: {} words", r.report.peak_core_words);
            prop_assert!(r.center.dist(runs[0].center) <= 1e-9, "s={s}: {:?} vs {:?}", r.center, runs[0].center);
        }
        for w in runs.windows(2) {
            prop_assert!(w[1].report.spt_replays <= w[0].report.spt_replays);
        }
    }
}
