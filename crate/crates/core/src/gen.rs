//! Random simple polygons for tests and benchmarks.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geom::Point;
use crate::polygon::Polygon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    Convex,
    Star,
    Comb,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Convex, Shape::Star, Shape::Comb];
}

fn sorted_angles(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let mut a: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        a.sort_by(|x, y| x.total_cmp(y));
        let min_gap = a
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain(std::iter::once(a[0] + std::f64::consts::TAU - a[n - 1]))
            .fold(f64::INFINITY, f64::min);
        if min_gap > 1e-3 / n as f64 {
            return a;
        }
    }
}

/// Vertices on an ellipse at random angles.
pub fn convex(rng: &mut impl Rng, n: usize) -> Polygon {
    let ry = rng.gen_range(0.5..1.0);
    let pts = sorted_angles(rng, n)
        .into_iter()
        .map(|a| Point::new(a.cos(), ry * a.sin()))
        .collect();
    Polygon::new(pts).expect("points in convex position")
}

/// Radially monotone polygon around the origin.
pub fn star(rng: &mut impl Rng, n: usize) -> Polygon {
    loop {
        let pts = sorted_angles(rng, n)
            .into_iter()
            .map(|a| {
                let r = rng.gen_range(0.25..1.0);
                Point::new(r * a.cos(), r * a.sin())
            })
            .collect();
        if let Ok(p) = Polygon::new(pts) {
            return p;
        }
    }
}

/// A base strip with `(n - 4) / 4` teeth of random height. `n` is rounded
/// down to `4 + 4k`.
pub fn comb(rng: &mut impl Rng, n: usize) -> Polygon {
    let k = (n.saturating_sub(4) / 4).max(1);
    let width = 1.0;
    let pitch = width / k as f64;
    let mut pts = vec![Point::new(0.0, 0.0), Point::new(width, 0.0)];
    let base = 0.2;
    for i in (0..k).rev() {
        let x0 = i as f64 * pitch;
        let a = x0 + pitch * rng.gen_range(0.1..0.3);
        let b = x0 + pitch * rng.gen_range(0.6..0.9);
        let h = base + rng.gen_range(0.2..1.0);
        let right_base = if i == k - 1 { width } else { x0 + pitch };
        if i == k - 1 {
            pts.push(Point::new(right_base, base));
        }
        pts.push(Point::new(b, base));
        pts.push(Point::new(b, h));
        pts.push(Point::new(a, h));
        pts.push(Point::new(a, base));
    }
    pts.push(Point::new(0.0, base));
    Polygon::new(pts).expect("comb is simple")
}

pub fn random(rng: &mut impl Rng, shape: Shape, n: usize) -> Polygon {
    match shape {
        Shape::Convex => convex(rng, n),
        Shape::Star => star(rng, n),
        Shape::Comb => comb(rng, n),
    }
}
