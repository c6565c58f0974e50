use std::collections::HashMap;

use crate::geom::{orient, Point};

/// Triangles as CCW vertex-index triples plus the dual adjacency.
#[derive(Debug, Clone, Default)]
pub struct Triangulation {
    pub triangles: Vec<[usize; 3]>,
    /// `neighbors[t][k]` is the triangle across the edge opposite corner `k`.
    pub neighbors: Vec<[Option<usize>; 3]>,
}

impl Triangulation {
    fn build(triangles: Vec<[usize; 3]>) -> Self {
        let mut by_edge: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        let mut neighbors = vec![[None; 3]; triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let u = tri[(k + 1) % 3];
                let w = tri[(k + 2) % 3];
                if let Some(&(t2, k2)) = by_edge.get(&(w, u)) {
                    neighbors[t][k] = Some(t2);
                    neighbors[t2][k2] = Some(t);
                } else {
                    by_edge.insert((u, w), (t, k));
                }
            }
        }
        Self {
            triangles,
            neighbors,
        }
    }

    /// Interior edges as `(lower, higher)` vertex pairs, sorted.
    pub fn diagonals(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                if let Some(t2) = self.neighbors[t][k] {
                    if t < t2 {
                        let u = tri[(k + 1) % 3];
                        let w = tri[(k + 2) % 3];
                        out.push((u.min(w), u.max(w)));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn in_closed_triangle(a: Point, b: Point, c: Point, p: Point) -> bool {
    orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0
}

/// Ear clipping of a CCW simple polygon. The ear with the lowest vertex index
/// is always clipped first, so the output is deterministic.
pub fn ear_clip_triangulate(v: &[Point]) -> Triangulation {
    let n = v.len();
    if n < 3 {
        return Triangulation::default();
    }
    let mut next: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let mut prev: Vec<usize> = (0..n).map(|i| (i + n - 1) % n).collect();
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut tris = Vec::with_capacity(n - 2);

    let is_convex =
        |prev: &[usize], next: &[usize], i: usize| orient(v[prev[i]], v[i], v[next[i]]) > 0;

    let is_ear = |prev: &[usize], next: &[usize], alive: &[bool], reflex: &[usize], i: usize| {
        let (a, b, c) = (prev[i], i, next[i]);
        if orient(v[a], v[b], v[c]) <= 0 {
            return false;
        }
        for &r in reflex {
            if !alive[r] || r == a || r == b || r == c {
                continue;
            }
            // Coincident points are distinct vertices in a valid polygon.
            if in_closed_triangle(v[a], v[b], v[c], v[r]) {
                return false;
            }
        }
        true
    };

    let mut reflex: Vec<usize> = (0..n).filter(|&i| !is_convex(&prev, &next, i)).collect();
    let mut ear: Vec<bool> = (0..n)
        .map(|i| is_ear(&prev, &next, &alive, &reflex, i))
        .collect();

    while remaining > 3 {
        let Some(i) = (0..n).find(|&i| alive[i] && ear[i]) else {
            // Degenerate input (collinear runs): fall back to any convex corner.
            let Some(i) = (0..n).find(|&i| alive[i] && is_convex(&prev, &next, i)) else {
                break;
            };
            clip(i, &mut prev, &mut next, &mut alive, &mut tris);
            remaining -= 1;
            continue;
        };
        let (a, c) = (prev[i], next[i]);
        clip(i, &mut prev, &mut next, &mut alive, &mut tris);
        remaining -= 1;
        reflex.retain(|&r| alive[r] && !is_convex(&prev, &next, r));
        ear[a] = is_ear(&prev, &next, &alive, &reflex, a);
        ear[c] = is_ear(&prev, &next, &alive, &reflex, c);
    }
    if remaining == 3 {
        if let Some(i) = (0..n).find(|&i| alive[i]) {
            tris.push([prev[i], i, next[i]]);
        }
    }
    Triangulation::build(tris)
}

fn clip(
    i: usize,
    prev: &mut [usize],
    next: &mut [usize],
    alive: &mut [bool],
    tris: &mut Vec<[usize; 3]>,
) {
    let (a, c) = (prev[i], next[i]);
    tris.push([a, i, c]);
    next[a] = c;
    prev[c] = a;
    alive[i] = false;
}
