//! Time against the workspace parameter s at a fixed n, plus the raw cost
//! of one shortest path tree replay.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use geocenter::center::{geodesic_center, CenterConfig};
use geocenter::gen::Shape;
use geocenter::spt::{FunnelProvider, SptProvider};
use geocenter::workspace::{ceil_log2, BudgetPolicy, Meter, WorkspaceBudget};
use geocenter::Point;
use geocenter_bench::polygon;

fn space_tradeoff(c: &mut Criterion) {
    let n = 1000;
    let poly = polygon(Shape::Star, n);
    let lg = ceil_log2(n);
    let mut g = c.benchmark_group("space_tradeoff_n1000");
    g.sample_size(10);
    let mut sizes = [lg, 4 * lg, (n as f64).sqrt().ceil() as usize, n];
    sizes.sort_unstable();
    for s in sizes {
        let cfg = CenterConfig {
            budget: WorkspaceBudget::new(s, BudgetPolicy::Enforce),
            ..CenterConfig::for_polygon(&poly)
        };
        g.bench_with_input(BenchmarkId::from_parameter(s), &cfg, |b, cfg| {
            b.iter(|| geodesic_center(&poly, cfg).unwrap())
        });
    }
    g.finish();
}

fn spt_replay(c: &mut Criterion) {
    let mut g = c.benchmark_group("spt_replay");
    for n in [256, 1024, 4096] {
        let poly = polygon(Shape::Star, n);
        let prov = FunnelProvider::new(&poly);
        let (lo, hi) = poly.bbox();
        let root: Point = lo.lerp(hi, 0.5);
        g.bench_with_input(BenchmarkId::from_parameter(n), &root, |b, &root| {
            b.iter(|| {
                let meter = Meter::unbounded(n);
                prov.stream(root, &meter)
                    .unwrap()
                    .map(|e| e.cum_dist)
                    .fold(0.0, f64::max)
            })
        });
    }
    g.finish();
}

criterion_group!(benches, space_tradeoff, spt_replay);
criterion_main!(benches);
