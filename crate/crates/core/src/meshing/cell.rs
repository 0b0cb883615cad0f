//! Per-cell analysis: per-direction indices, filtering, voting, index combining and the
//! surface offsets on a cell's owned edges.

use nalgebra::Vector3;

use super::cube::{center_gradient, component_gradient, components, is_trivial, sign_gradient, CORNERS, OWNED};
use super::MeshConfig;
use crate::volume::{
    block_of, BlockCoord, BlockMap, Channel, Direction, Voxel, VoxelBlock, VoxelCoord, BLOCK_SIDE,
};

/// Floor for the combined weight of a direction in offset averaging.
const MIN_OFFSET_WEIGHT: f64 = 1e-6;

/// Mesh-extraction state of one cell: up to two combined indices and the vertex offsets of
/// the three owned edges, one per surface side (`NaN` when absent).
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct CellState {
    pub slots: [u8; 2],
    pub offsets: [[f64; 2]; 3],
}

impl Default for CellState {
    fn default() -> Self {
        CellState { slots: [0; 2], offsets: [[f64::NAN; 2]; 3] }
    }
}

impl CellState {
    pub fn has_surface(&self) -> bool {
        self.slots.iter().any(|&m| !is_trivial(m))
    }
}

/// A block together with its seven neighbors on the positive side, enough to read every
/// corner of every cell whose minimum corner lies in the block.
pub(crate) struct Neighborhood<'a> {
    origin: VoxelCoord,
    blocks: [Option<&'a VoxelBlock>; 8],
}

impl<'a> Neighborhood<'a> {
    pub fn new(map: &'a BlockMap, coord: BlockCoord) -> Neighborhood<'a> {
        let mut blocks = [None; 8];
        for (i, b) in blocks.iter_mut().enumerate() {
            let c = [
                coord[0] + (i & 1) as i32,
                coord[1] + ((i >> 1) & 1) as i32,
                coord[2] + ((i >> 2) & 1) as i32,
            ];
            *b = map.block(c);
        }
        Neighborhood {
            origin: [coord[0] * BLOCK_SIDE, coord[1] * BLOCK_SIDE, coord[2] * BLOCK_SIDE],
            blocks,
        }
    }

    #[inline]
    fn voxel(&self, v: VoxelCoord, channel: Channel) -> Option<&'a Voxel> {
        let r = [v[0] - self.origin[0], v[1] - self.origin[1], v[2] - self.origin[2]];
        debug_assert!(r.iter().all(|&x| (0..2 * BLOCK_SIDE).contains(&x)));
        let i = (r[0] >= BLOCK_SIDE) as usize
            | ((r[1] >= BLOCK_SIDE) as usize) << 1
            | ((r[2] >= BLOCK_SIDE) as usize) << 2;
        let (_, idx) = block_of(r);
        self.blocks[i]?.array(channel).map(|a| &a[idx])
    }

    /// Corner values and mean corner weight of a cell, if all eight corners are observed.
    pub fn corners(&self, cell: VoxelCoord, channel: Channel) -> Option<([f64; 8], f64)> {
        let mut values = [0.0; 8];
        let mut weight = 0.0;
        for (c, off) in CORNERS.iter().enumerate() {
            let v = self.voxel([cell[0] + off[0], cell[1] + off[1], cell[2] + off[2]], channel)?;
            if v.weight <= 0.0 {
                return None;
            }
            values[c] = v.sdf;
            weight += v.weight;
        }
        Some((values, weight / 8.0))
    }
}

/// Sign mask of corner values: bit set where the value is negative.
#[inline]
pub(crate) fn index_of(values: &[f64; 8]) -> u8 {
    values
        .iter()
        .enumerate()
        .fold(0u8, |m, (c, &v)| if v < 0.0 { m | (1 << c) } else { m })
}

/// One direction's view of a cell.
#[derive(Clone, Copy, Debug)]
pub(crate) struct DirSample {
    pub direction: Direction,
    pub values: [f64; 8],
    pub weight: f64,
    pub index: u8,
    /// Center gradient per voxel edge length (dimensionless for a true distance field).
    pub gradient: Vector3<f64>,
}

impl DirSample {
    pub fn new(direction: Direction, values: [f64; 8], weight: f64, h: f64) -> DirSample {
        DirSample {
            direction,
            values,
            weight,
            index: index_of(&values),
            gradient: center_gradient(&values) / h,
        }
    }

    /// Combined credibility `w_sdf * <grad, v_D>`.
    pub fn credibility(&self) -> f64 {
        self.weight * self.gradient.dot(&self.direction.vector())
    }
}

/// Corners of the cube face that `direction` points at. An index whose inside set is exactly
/// this face describes a surface facing away from the direction.
pub(crate) fn back_face(direction: Direction) -> u8 {
    let axis = direction.axis();
    let side = if direction.sign() > 0.0 { 1 } else { 0 };
    (0..8).fold(0u8, |m, c| if CORNERS[c][axis] == side { m | (1 << c) } else { m })
}

/// Removes the components of an index whose surface cannot have been observed from
/// `direction`: those facing more than `pi/2 + asin(threshold)` away from it.
pub fn intra_directional_filter(index: u8, values: &[f64; 8], direction: Direction, threshold: f64) -> u8 {
    if is_trivial(index) {
        return index;
    }
    if index == back_face(direction) {
        return 0;
    }
    let v = direction.vector();
    let plausible = |g: Vector3<f64>| {
        let n = g.norm();
        n == 0.0 || g.dot(&v) / n > -threshold
    };
    let comps = components(index);
    if comps.len() == 1 {
        return if plausible(center_gradient(values)) { index } else { 0 };
    }
    comps
        .into_iter()
        .filter(|&c| plausible(component_gradient(c, values)))
        .fold(0, |m, c| m | c)
}

/// Whether a component may be intersected into a combined slot.
pub(crate) fn compatible(component: u8, slot: Option<u8>) -> bool {
    match slot {
        None => true,
        Some(s) => {
            let m = component & s;
            !is_trivial(m) && sign_gradient(m).dot(&sign_gradient(component)) > 0.0
        }
    }
}

/// Greedily intersects the components of the per-direction indices into at most two
/// combined indices. Returns the combined indices (0 for an unused slot) and the number of
/// components compatible with neither slot.
pub fn combine_indices(indices: &[u8]) -> ([u8; 2], usize) {
    let mut slots: [Option<u8>; 2] = [None, None];
    let mut dropped = 0;
    for &index in indices {
        if is_trivial(index) {
            continue;
        }
        for c in components(index) {
            if let Some(slot) = slots.iter_mut().find(|s| compatible(c, **s)) {
                *slot = Some(slot.map_or(c, |s| s & c));
            } else {
                dropped += 1;
            }
        }
    }
    ([slots[0].unwrap_or(0), slots[1].unwrap_or(0)], dropped)
}

/// Zero crossing of `a -> b` with the given side: side 0 runs from inside (negative) at the
/// lower end to outside, side 1 the other way round.
#[inline]
pub(crate) fn crossing(a: f64, b: f64, side: usize) -> Option<f64> {
    let hit = if side == 0 { a < 0.0 && b >= 0.0 } else { a >= 0.0 && b < 0.0 };
    hit.then(|| (a / (a - b)).clamp(0.0, 1.0))
}

/// Inter-directional consensus of a cell. A direction votes against the surface hypotheses
/// when all its corners lie well in front of any surface.
pub(crate) fn vote(samples: &[DirSample], truncation: f64, cfg: &MeshConfig) -> f64 {
    let front = cfg.front_fraction * truncation;
    let (mut sum, mut scale) = (0.0, 0.0);
    for s in samples {
        let a = if s.values.iter().all(|&v| v > front) { -1.0 } else { 1.0 };
        let term = s.credibility() * a;
        sum += term;
        scale += term.abs();
    }
    // Exact ties are decided in favor of the surface; do not let rounding break them.
    if sum.abs() <= 1e-12 * scale {
        0.0
    } else {
        sum
    }
}

/// Full directional analysis of one cell. Returns the cell state and dropped components.
pub(crate) fn analyze_directional(
    nb: &Neighborhood,
    cell: VoxelCoord,
    h: f64,
    truncation: f64,
    cfg: &MeshConfig,
) -> (CellState, usize) {
    let mut samples: Vec<DirSample> = Vec::with_capacity(6);
    for d in Direction::ALL {
        if let Some((values, weight)) = nb.corners(cell, Channel::Dir(d)) {
            samples.push(DirSample::new(d, values, weight, h));
        }
    }
    let mut state = CellState::default();
    if samples.is_empty() {
        return (state, 0);
    }
    let filtered: Vec<u8> = samples
        .iter()
        .map(|s| intra_directional_filter(s.index, &s.values, s.direction, cfg.direction_threshold))
        .collect();
    let consensus = vote(&samples, truncation, cfg);
    let kept: Vec<u8> = filtered
        .iter()
        .map(|&m| if is_trivial(m) || consensus >= 0.0 { m } else { 0 })
        .collect();
    let (slots, dropped) = combine_indices(&kept);
    state.slots = slots;

    for (axis, &corner) in OWNED.iter().enumerate() {
        for side in 0..2 {
            let (mut sum, mut norm) = (0.0, 0.0);
            for (s, &m) in samples.iter().zip(&kept) {
                if is_trivial(m) {
                    continue;
                }
                if let Some(t) = crossing(s.values[0], s.values[corner], side) {
                    let w = s.credibility().max(MIN_OFFSET_WEIGHT);
                    sum += w * t;
                    norm += w;
                }
            }
            if norm > 0.0 {
                state.offsets[axis][side] = sum / norm;
            }
        }
    }
    (state, dropped)
}

/// Classic marching-cubes state of one cell of an undirected volume.
pub(crate) fn analyze_classic(nb: &Neighborhood, cell: VoxelCoord) -> CellState {
    let mut state = CellState::default();
    if let Some((values, _)) = nb.corners(cell, Channel::Undirected) {
        state.slots[0] = index_of(&values);
        for (axis, &corner) in OWNED.iter().enumerate() {
            for side in 0..2 {
                if let Some(t) = crossing(values[0], values[corner], side) {
                    state.offsets[axis][side] = t;
                }
            }
        }
    }
    state
}

/// Offset of an edge computed from the edge endpoints alone, averaged over every channel
/// with both endpoints observed and a crossing of the requested side.
pub(crate) fn edge_offset(map: &BlockMap, owner: VoxelCoord, axis: usize, side: usize) -> Option<f64> {
    let mut upper = owner;
    upper[axis] += 1;
    let (mut sum, mut norm) = (0.0, 0.0);
    for &channel in map.layout().channels() {
        let (Some(a), Some(b)) = (map.voxel(owner, channel), map.voxel(upper, channel)) else {
            continue;
        };
        if a.weight <= 0.0 || b.weight <= 0.0 {
            continue;
        }
        if let Some(t) = crossing(a.sdf, b.sdf, side) {
            let w = 0.5 * (a.weight + b.weight);
            sum += w * t;
            norm += w;
        }
    }
    (norm > 0.0).then(|| sum / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{ChannelSet, Layout};

    fn plane_values(n: Vector3<f64>, offset: f64) -> [f64; 8] {
        let mut v = [0.0; 8];
        for (c, off) in CORNERS.iter().enumerate() {
            let p = Vector3::new(off[0] as f64, off[1] as f64, off[2] as f64);
            v[c] = n.dot(&p) - offset;
        }
        v
    }

    #[test]
    fn aligned_surface_is_kept() {
        let values = plane_values(Vector3::x(), 0.5);
        let idx = index_of(&values);
        assert_eq!(intra_directional_filter(idx, &values, Direction::XPos, 0.38), idx);
    }

    #[test]
    fn back_face_is_removed() {
        let values = plane_values(-Vector3::x(), -0.5);
        let idx = index_of(&values);
        assert_eq!(idx, back_face(Direction::XPos));
        assert_eq!(intra_directional_filter(idx, &values, Direction::XPos, 0.38), 0);
    }

    #[test]
    fn steep_surface_is_removed_by_gradient() {
        // Leans towards +x, outside the cone of X-.
        let n = Vector3::new(0.6, 0.8, 0.0);
        let values = plane_values(n, 0.7);
        let idx = index_of(&values);
        assert!(!is_trivial(idx));
        assert_eq!(intra_directional_filter(idx, &values, Direction::XNeg, 0.38), 0);
        assert_eq!(intra_directional_filter(idx, &values, Direction::YPos, 0.38), idx);
    }

    #[test]
    fn combining() {
        assert_eq!(combine_indices(&[0x0F]), ([0x0F, 0], 0));
        // Opposite faces of a thin sheet land in separate slots.
        assert_eq!(combine_indices(&[0x0F, 0xF0]), ([0x0F, 0xF0], 0));
        // Two orthogonal half spaces intersect into their common corner region.
        let x = 0x99; // inside at x = 0
        let y = 0x33; // inside at y = 0
        assert_eq!(combine_indices(&[x, y]), ([x & y, 0], 0));
        // A third incompatible hypothesis is dropped.
        assert_eq!(combine_indices(&[0x0F, 0xF0, 0x7D]), ([0x0F, 0xF0], 1));
    }

    #[test]
    fn equal_and_opposite_votes_keep_the_surface() {
        let cfg = MeshConfig::default();
        let tau = 0.04;
        let h = 0.01;
        let x = DirSample::new(Direction::XPos, plane_values(Vector3::x() * h, 0.5 * h), 1.0, h);
        // Identical credibility but entirely in front of its own surface.
        let y = DirSample::new(Direction::XNeg, plane_values(-Vector3::x() * h, -0.035), 1.0, h);
        let samples = [x, y];
        assert!(y.values.iter().all(|&v| v > cfg.front_fraction * tau));
        assert!((samples[0].credibility() - samples[1].credibility()).abs() < 1e-9);
        assert_eq!(vote(&samples, tau, &cfg), 0.0);
    }

    #[test]
    fn edge_offset_uses_observed_endpoints() {
        let mut map = BlockMap::new(0.01, 4.0, Layout::Undirected).unwrap();
        map.allocate([0, 0, 0], ChannelSet::single(Channel::Undirected)).unwrap();
        *map.voxel_mut([0, 0, 0], Channel::Undirected).unwrap() = Voxel::new(-0.005, 1.0);
        *map.voxel_mut([1, 0, 0], Channel::Undirected).unwrap() = Voxel::new(0.005, 1.0);
        assert_eq!(edge_offset(&map, [0, 0, 0], 0, 0), Some(0.5));
        assert_eq!(edge_offset(&map, [0, 0, 0], 0, 1), None);
        assert_eq!(edge_offset(&map, [0, 0, 0], 1, 0), None);
    }
}
