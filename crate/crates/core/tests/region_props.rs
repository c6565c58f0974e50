use geocenter::gen::{self, Shape};
use geocenter::polygon::{
    balanced_vertical_chord, choose_shear, region_vertex_count, split_region,
    vertical_ray_hits_batch, BoundaryRun, ChordSplit, Polygon,
};
use geocenter::workspace::Meter;
use geocenter::{Point, Side};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shape_strategy() -> impl Strategy<Value = Shape> {
    prop_oneof![Just(Shape::Convex), Just(Shape::Star), Just(Shape::Comb)]
}

/// Nearest crossings above and below `q` by scanning every edge of the
/// sheared polygon.
fn naive_hits(sheared: &[Point], q: Point) -> (Option<f64>, Option<f64>) {
    let n = sheared.len();
    let (mut above, mut below): (Option<f64>, Option<f64>) = (None, None);
    for i in 0..n {
        let (a, b) = (sheared[i], sheared[(i + 1) % n]);
        if (a.x - q.x) * (b.x - q.x) >= 0.0 {
            continue;
        }
        let y = a.y + (q.x - a.x) / (b.x - a.x) * (b.y - a.y);
        if y > q.y && above.map_or(true, |v| y < v) {
            above = Some(y);
        }
        if y < q.y && below.map_or(true, |v| y > v) {
            below = Some(y);
        }
    }
    (above, below)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ray_hits_match_naive_scan(seed in any::<u64>(), shape in shape_strategy(), n in 4usize..80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly = gen::random(&mut rng, shape, n);
        let shear = choose_shear(&poly);
        let run = BoundaryRun::whole(shear);
        let sheared: Vec<Point> = poly.vertices().iter().map(|&p| shear.apply(p)).collect();
        let (lo, hi) = poly.bbox();
        let qs: Vec<Point> = (0..16)
            .map(|_| shear.apply(Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y))))
            .collect();
        let meter = Meter::unbounded(poly.len());
        let hits = vertical_ray_hits_batch(&poly, &run, &qs, &meter).unwrap();
        for (q, h) in qs.iter().zip(&hits) {
            let (a, b) = naive_hits(&sheared, *q);
            prop_assert_eq!(h.above.map(|r| r.y), a);
            prop_assert_eq!(h.below.map(|r| r.y), b);
        }
    }

    #[test]
    fn balanced_chord_bound_and_split_counts(seed in any::<u64>(), shape in shape_strategy(), n in 12usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let poly: Polygon = gen::random(&mut rng, shape, n);
        let meter = Meter::unbounded(poly.len());
        let mut run = BoundaryRun::whole(choose_shear(&poly));
        // Follow a random branch of the recursion down to a small region.
        for _ in 0..12 {
            let m = region_vertex_count(&poly, &run, &meter);
            if m <= 12 {
                break;
            }
            let split = balanced_vertical_chord(&poly, &run, &meter).unwrap();
            prop_assert!(split.max_side() <= ChordSplit::bound(m));
            prop_assert_eq!(split.left_count + split.right_count, m + 3);
            let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
            let next = split_region(&poly, &run, &split.chord, side, &meter).unwrap();
            let want = if side == Side::Left { split.left_count } else { split.right_count };
            prop_assert_eq!(region_vertex_count(&poly, &next, &meter), want);
            run = next;
        }
    }
}
