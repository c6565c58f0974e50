use geocenter::gen::{self, Shape};
use geocenter::oracle::VisibilityGraph;
use geocenter::polygon::Polygon;
use geocenter::spt::{farthest_cone, root_child_circles, FunnelProvider, Parent, SptProvider};
use geocenter::workspace::Meter;
use geocenter::Point;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn interior_point(rng: &mut impl Rng, poly: &Polygon) -> Point {
    let (lo, hi) = poly.bbox();
    loop {
        let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if poly.locate(p) == 1 {
            return p;
        }
    }
}

fn shape_strategy() -> impl Strategy<Value = Shape> {
    prop_oneof![Just(Shape::Convex), Just(Shape::Star), Just(Shape::Comb)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn tree_distances_match_visibility_graph(seed in any::<u64>(), shape in shape_strategy(), n in 5usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = gen::random(&mut rng, shape, n);
        let graph = VisibilityGraph::new(&poly);
        let prov = FunnelProvider::new(&poly);
        let meter = Meter::unbounded(poly.len());
        let x = interior_point(&mut rng, &poly);
        let want = graph.distances_from(x);
        let mut seen = vec![false; poly.len()];
        let mut cum = vec![0.0; poly.len()];
        for e in prov.stream(x, &meter).unwrap() {
            prop_assert!((e.cum_dist - want[e.child]).abs() < 1e-9, "vertex {} got {} want {}", e.child, e.cum_dist, want[e.child]);
            prop_assert!(e.cum_dist + 1e-12 >= x.dist(e.child_point));
            let base = match e.parent {
                Parent::Root => 0.0,
                Parent::Vertex(p) => { prop_assert!(seen[p]); cum[p] }
            };
            prop_assert!((e.cum_dist - base - e.parent_point.dist(e.child_point)).abs() < 1e-12);
            prop_assert!(poly.segment_inside(e.parent_point, e.child_point));
            seen[e.child] = true;
            cum[e.child] = e.cum_dist;
        }
        prop_assert!(seen.iter().all(|&s| s));

        let far = farthest_cone(&prov, x, 1e-9, &meter).unwrap();
        let g = want.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert!((far.distance - g).abs() < 1e-9);
        let circ = root_child_circles(&prov, x, &meter).unwrap()
            .map(|c| c.circle.value(x)).fold(f64::MIN, f64::max);
        prop_assert!((circ - g).abs() < 1e-9);
    }

    #[test]
    fn point_distances_are_symmetric(seed in any::<u64>(), shape in shape_strategy(), n in 5usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = gen::random(&mut rng, shape, n);
        let prov = FunnelProvider::new(&poly);
        let meter = Meter::unbounded(poly.len());
        let graph = VisibilityGraph::new(&poly);
        let (p, q) = (interior_point(&mut rng, &poly), interior_point(&mut rng, &poly));
        let a = geocenter::spt::geodesic_distance(&prov, p, q, &meter).unwrap();
        let b = geocenter::spt::geodesic_distance(&prov, q, p, &meter).unwrap();
        prop_assert!((a - b).abs() < 1e-8);
        prop_assert!((a - graph.distance(p, q)).abs() < 1e-8);
    }
}
