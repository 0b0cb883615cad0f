//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use nalgebra::{Point3, Vector3};

/// Cells met by `origin + t * dir`, `t ∈ [t_min, t_max)`, found by listing every boundary
/// crossing time and sampling the segment between consecutive crossings. Exact for segments
/// whose crossings are separated by more than rounding noise.
pub fn traversal_oracle(
    origin: &Point3<f64>,
    dir: &Vector3<f64>,
    t_min: f64,
    t_max: f64,
    h: f64,
) -> Vec<[i64; 3]> {
    if t_max <= t_min || t_max.is_nan() || t_min.is_nan() {
        return Vec::new();
    }
    let mut times = vec![t_min, t_max];
    for a in 0..3 {
        if dir[a] == 0.0 {
            continue;
        }
        let x0 = origin[a] + t_min * dir[a];
        let x1 = origin[a] + t_max * dir[a];
        let (lo, hi) = (x0.min(x1), x0.max(x1));
        let mut b = (lo / h).floor() as i64 - 1;
        while (b as f64) * h <= hi + h {
            let t = ((b as f64) * h - origin[a]) / dir[a];
            if t > t_min && t < t_max {
                times.push(t);
            }
            b += 1;
        }
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    let cell_at = |t: f64| {
        let p = origin + dir * t;
        [(p.x / h).floor() as i64, (p.y / h).floor() as i64, (p.z / h).floor() as i64]
    };
    let mut out: Vec<[i64; 3]> = Vec::new();
    for w in times.windows(2) {
        let c = cell_at(0.5 * (w[0] + w[1]));
        if out.last() != Some(&c) {
            out.push(c);
        }
    }
    out
}

/// Unit-cube corner positions in marching-cubes corner order.
pub const CUBE_CORNERS: [[u8; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

/// Connected components of the set corners of `mask`; corners are adjacent when their
/// positions differ along exactly one axis. Components are ordered by lowest corner.
pub fn components_oracle(mask: u8) -> Vec<u8> {
    let adjacent = |a: usize, b: usize| {
        (0..3).filter(|&k| CUBE_CORNERS[a][k] != CUBE_CORNERS[b][k]).count() == 1
    };
    let mut seen = [false; 8];
    let mut out = Vec::new();
    for start in 0..8 {
        if mask & (1 << start) == 0 || seen[start] {
            continue;
        }
        let mut comp = 0u8;
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(c) = queue.pop_front() {
            comp |= 1 << c;
            for (n, seen_n) in seen.iter_mut().enumerate() {
                if mask & (1 << n) != 0 && !*seen_n && adjacent(c, n) {
                    *seen_n = true;
                    queue.push_back(n);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Closed-form weighted mean `Σ w d / Σ w`.
pub fn weighted_mean(samples: &[(f64, f64)]) -> f64 {
    let sw: f64 = samples.iter().map(|s| s.1).sum();
    samples.iter().map(|s| s.0 * s.1).sum::<f64>() / sw
}

/// Closest point on triangle `abc` by exhaustive comparison of the interior projection, the
/// three edge projections and the three corners.
pub fn closest_point_oracle(p: &Point3<f64>, tri: &[Point3<f64>; 3]) -> Point3<f64> {
    let [a, b, c] = tri;
    let mut candidates = vec![*a, *b, *c];
    for (u, v) in [(a, b), (b, c), (c, a)] {
        let e = v - u;
        let t = ((p - u).dot(&e) / e.norm_squared()).clamp(0.0, 1.0);
        candidates.push(u + e * t);
    }
    let n = (b - a).cross(&(c - a));
    if n.norm_squared() > 0.0 {
        let q = p - n * ((p - a).dot(&n) / n.norm_squared());
        // Barycentric inside test.
        let inside = [(a, b), (b, c), (c, a)].iter().all(|(u, v)| (*v - *u).cross(&(q - *u)).dot(&n) >= 0.0);
        if inside {
            candidates.push(q);
        }
    }
    candidates.into_iter().min_by(|x, y| (x - p).norm_squared().total_cmp(&(y - p).norm_squared())).unwrap()
}

/// Whether every point of `a` has a point of `b` within `tol`, and the counts agree.
pub fn same_point_sets(a: &[Point3<f64>], b: &[Point3<f64>], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let key = |p: &Point3<f64>| [(p.x / tol).floor() as i64, (p.y / tol).floor() as i64, (p.z / tol).floor() as i64];
    let mut grid: HashMap<[i64; 3], Vec<Point3<f64>>> = HashMap::new();
    for p in b {
        grid.entry(key(p)).or_default().push(*p);
    }
    a.iter().all(|p| {
        let k = key(p);
        (-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                (-1..=1).any(|dz| {
                    grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz])
                        .is_some_and(|v| v.iter().any(|q| (q - p).norm() <= tol))
                })
            })
        })
    })
}
