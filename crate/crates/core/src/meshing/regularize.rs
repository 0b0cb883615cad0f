//! Neighborhood regularization of combined indices.
//!
//! Every lattice point is shared by the eight cells around it. Among the slots of those cells
//! whose surfaces face the same way, the inside/outside bit of that lattice point is set to the
//! majority; ties keep the current bit. Facing is the sign of the slot's index orientation
//! against a fixed reference vector, which keeps the two sheets of a thin structure apart.

use std::collections::HashMap;

use nalgebra::Vector3;

use super::cube::{is_trivial, sign_gradient, CORNERS};
use super::extract::cell_of;
use crate::par;
use crate::volume::{block_of, BlockCoord, VoxelCoord};
#[cfg(test)]
use crate::volume::BLOCK_VOXELS;

/// Combined indices of every cell of the analyzed blocks.
pub(crate) type SlotField = HashMap<BlockCoord, Vec<[u8; 2]>>;

fn reference() -> Vector3<f64> {
    Vector3::new(0.5, 0.6, 0.7)
}

/// `+1` / `-1` for the two hemispheres, `0` when undecided or trivial.
pub(crate) fn facing(mask: u8) -> i8 {
    if is_trivial(mask) {
        return 0;
    }
    let s = sign_gradient(mask).dot(&reference());
    if s > 1e-9 {
        1
    } else if s < -1e-9 {
        -1
    } else {
        0
    }
}

#[inline]
fn slots_at(field: &SlotField, cell: VoxelCoord) -> Option<[u8; 2]> {
    let (b, i) = block_of(cell);
    field.get(&b).map(|cells| cells[i])
}

/// Votes `(inside, outside)` of the slots facing `f` around the lattice point `p`.
fn tally(field: &SlotField, p: VoxelCoord, f: i8) -> (u32, u32) {
    let (mut inside, mut outside) = (0, 0);
    for (c, off) in CORNERS.iter().enumerate() {
        let cell = [p[0] - off[0], p[1] - off[1], p[2] - off[2]];
        let Some(slots) = slots_at(field, cell) else { continue };
        for m in slots {
            if facing(m) != f {
                continue;
            }
            if m & (1 << c) != 0 {
                inside += 1;
            } else {
                outside += 1;
            }
        }
    }
    (inside, outside)
}

fn sweep(field: &SlotField) -> SlotField {
    let coords: Vec<BlockCoord> = field.keys().copied().collect();
    let updated = par::map_slice(&coords, |&b| {
        let mut cells = field[&b].clone();
        for (i, slots) in cells.iter_mut().enumerate() {
            let cell = cell_of(b, i);
            for m in slots.iter_mut() {
                let f = facing(*m);
                if f == 0 {
                    continue;
                }
                let old = *m;
                for (c, off) in CORNERS.iter().enumerate() {
                    let p = [cell[0] + off[0], cell[1] + off[1], cell[2] + off[2]];
                    let (inside, outside) = tally(field, p, f);
                    if inside > outside {
                        *m |= 1 << c;
                    } else if outside > inside {
                        *m &= !(1 << c);
                    } else {
                        *m = (*m & !(1 << c)) | (old & (1 << c));
                    }
                }
            }
        }
        (b, cells)
    });
    updated.into_iter().collect()
}

/// Number of disagreeing ordered pairs of same-facing slots over all shared lattice points.
pub(crate) fn disagreements(field: &SlotField) -> u64 {
    let coords: Vec<BlockCoord> = field.keys().copied().collect();
    par::map_slice(&coords, |&b| {
        let mut count = 0u64;
        for (i, slots) in field[&b].iter().enumerate() {
            let cell = cell_of(b, i);
            for &m in slots {
                let f = facing(m);
                if f == 0 {
                    continue;
                }
                for (c, off) in CORNERS.iter().enumerate() {
                    let p = [cell[0] + off[0], cell[1] + off[1], cell[2] + off[2]];
                    let (inside, outside) = tally(field, p, f);
                    count += if m & (1 << c) != 0 { outside } else { inside } as u64;
                }
            }
        }
        count
    })
    .into_iter()
    .sum()
}

/// Runs up to `sweeps` regularization passes. A pass that would increase the number of
/// disagreements is discarded and ends the iteration. Returns the number of changed bits.
pub(crate) fn regularize(field: &mut SlotField, sweeps: usize) -> usize {
    let mut changed = 0;
    let mut before = disagreements(field);
    for _ in 0..sweeps {
        let next = sweep(field);
        let after = disagreements(&next);
        if after > before {
            break;
        }
        let flips: usize = next
            .iter()
            .map(|(b, cells)| {
                cells
                    .iter()
                    .zip(&field[b])
                    .map(|(n, o)| ((n[0] ^ o[0]).count_ones() + (n[1] ^ o[1]).count_ones()) as usize)
                    .sum::<usize>()
            })
            .sum();
        *field = next;
        before = after;
        changed += flips;
        if flips == 0 {
            break;
        }
    }
    changed
}

/// Empty per-block slot storage.
#[cfg(test)]
pub(crate) fn empty_cells() -> Vec<[u8; 2]> {
    vec![[0; 2]; BLOCK_VOXELS]
}
