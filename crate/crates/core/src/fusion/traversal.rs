//! Amanatides–Woo voxel traversal.
//!
//! Cell `c` covers `[c*h, (c+1)*h)` on every axis and the segment covers `t ∈ [t_min, t_max)`,
//! so a segment ending exactly on a cell boundary does not enter the next cell. Crossing times are evaluated as
//! `(boundary - origin) / dir` for each boundary rather than accumulated, so the walk agrees
//! exactly with a per-cell interval test evaluated with the same expression. When several axes
//! reach a boundary at the same instant they step together (the segment passes through a cell
//! edge or corner); axes leaving towards positive coordinates step before axes leaving towards
//! negative ones, since the half-open cells make the intermediate cell exist at that instant.

use nalgebra::{Point3, Vector3};

use crate::volume::VoxelCoord;

/// Iterator over the lattice cells hit by the segment `origin + t * dir`, `t ∈ [t_min, t_max)`.
#[derive(Clone, Debug)]
pub struct VoxelTraversal {
    cell: VoxelCoord,
    origin: [f64; 3],
    dir: [f64; 3],
    h: f64,
    /// Time of the next boundary event per axis.
    next: [f64; 3],
    t_max: f64,
    pending_negative: Option<f64>,
    started: bool,
    done: bool,
}

impl VoxelTraversal {
    pub fn new(
        origin: &Point3<f64>,
        dir: &Vector3<f64>,
        t_min: f64,
        t_max: f64,
        voxel_size: f64,
    ) -> VoxelTraversal {
        let mut walk = VoxelTraversal {
            cell: [0; 3],
            origin: [origin.x, origin.y, origin.z],
            dir: [dir.x, dir.y, dir.z],
            h: voxel_size,
            next: [f64::INFINITY; 3],
            t_max,
            pending_negative: None,
            started: false,
            done: true,
        };
        let finite = walk.origin.iter().chain(walk.dir.iter()).all(|v| v.is_finite())
            && t_min.is_finite()
            && t_max.is_finite()
            && voxel_size > 0.0;
        if !finite || t_min >= t_max {
            return walk;
        }
        for a in 0..3 {
            let o = walk.origin[a];
            let d = walk.dir[a];
            let p = o + t_min * d;
            let mut c = (p / voxel_size).floor() as i32;
            if d > 0.0 {
                while walk.boundary(a, c) > t_min {
                    c -= 1;
                }
                while walk.boundary(a, c + 1) <= t_min {
                    c += 1;
                }
                walk.next[a] = walk.boundary(a, c + 1);
            } else if d < 0.0 {
                while walk.boundary(a, c) < t_min {
                    c += 1;
                }
                while walk.boundary(a, c + 1) >= t_min {
                    c -= 1;
                }
                walk.next[a] = walk.boundary(a, c);
            } else {
                c = (o / voxel_size).floor() as i32;
                while c as f64 * voxel_size > o {
                    c -= 1;
                }
                while (c + 1) as f64 * voxel_size <= o {
                    c += 1;
                }
            }
            walk.cell[a] = c;
        }
        walk.done = false;
        walk
    }

    /// Time at which the ray crosses lattice plane `b` on axis `a`.
    #[inline]
    fn boundary(&self, a: usize, b: i32) -> f64 {
        (b as f64 * self.h - self.origin[a]) / self.dir[a]
    }

    fn step_axes(&mut self, t: f64, positive: bool) {
        for a in 0..3 {
            if self.next[a] != t || (self.dir[a] > 0.0) != positive {
                continue;
            }
            if positive {
                // Skip cells whose time interval collapsed to nothing.
                while self.next[a] == t {
                    self.cell[a] += 1;
                    self.next[a] = self.boundary(a, self.cell[a] + 1);
                }
            } else {
                while self.next[a] == t {
                    self.cell[a] -= 1;
                    self.next[a] = self.boundary(a, self.cell[a]);
                }
            }
        }
    }
}

impl Iterator for VoxelTraversal {
    type Item = VoxelCoord;

    fn next(&mut self) -> Option<VoxelCoord> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.cell);
        }
        if let Some(t) = self.pending_negative.take() {
            if t >= self.t_max {
                self.done = true;
                return None;
            }
            self.step_axes(t, false);
            return Some(self.cell);
        }
        let t = self.next.iter().copied().fold(f64::INFINITY, f64::min);
        if !t.is_finite() {
            self.done = true;
            return None;
        }
        let hits = |positive: bool| {
            (0..3).any(|a| self.next[a] == t && self.dir[a] != 0.0 && (self.dir[a] > 0.0) == positive)
        };
        let (pos, neg) = (hits(true), hits(false));
        if t >= self.t_max {
            self.done = true;
            return None;
        }
        if pos {
            self.step_axes(t, true);
            if neg {
                self.pending_negative = Some(t);
            }
            return Some(self.cell);
        }
        self.step_axes(t, false);
        Some(self.cell)
    }
}

/// Cells hit by the segment `origin + t * dir`, `t ∈ [t_min, t_max)`, in ray order.
pub fn traverse_voxels(
    origin: &Point3<f64>,
    dir: &Vector3<f64>,
    t_min: f64,
    t_max: f64,
    voxel_size: f64,
) -> Vec<VoxelCoord> {
    VoxelTraversal::new(origin, dir, t_min, t_max, voxel_size).collect()
}
