//! Shared inputs for the benchmarks.

use geocenter::chord_center::SolverConfig;
use geocenter::gen::{self, Shape};
use geocenter::polygon::Polygon;
use geocenter::{Point, Segment};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A fixed random polygon per (shape, n).
pub fn polygon(shape: Shape, n: usize) -> Polygon {
    gen::random(&mut ChaCha8Rng::seed_from_u64(n as u64), shape, n)
}

/// A horizontal chord through the middle of the bounding box, clipped to
/// the polygon by halving towards the box center until it fits.
pub fn middle_segment(poly: &Polygon) -> Option<Segment> {
    let (lo, hi) = poly.bbox();
    let mid = lo.lerp(hi, 0.5);
    let half = 0.5 * (hi.x - lo.x);
    (0..40).map(|k| half * 0.8f64.powi(k)).find_map(|h| {
        let (a, b) = (Point::new(mid.x - h, mid.y), Point::new(mid.x + h, mid.y));
        poly.segment_inside(a, b)
            .then(|| Segment::new(a, b).ok())
            .flatten()
    })
}

pub fn solver() -> SolverConfig {
    SolverConfig::default()
}
