use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};

use nalgebra::Point3;

use super::direction::{Direction, DirectionSet};
use super::voxel::Voxel;
use crate::error::{Error, Result};
use crate::par;

/// Voxels along one side of a block.
pub const BLOCK_SIDE: i32 = 8;
pub const BLOCK_VOXELS: usize = (BLOCK_SIDE * BLOCK_SIDE * BLOCK_SIDE) as usize;

pub type BlockCoord = [i32; 3];
/// Global lattice index of a voxel; its sample sits on the minimum corner of the cell.
pub type VoxelCoord = [i32; 3];

/// Whether a volume stores six directional channels or the single classic TSDF channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layout {
    Directional,
    Undirected,
}

impl Layout {
    pub fn channels(self) -> &'static [Channel] {
        const DIRECTIONAL: [Channel; 6] = [
            Channel::Dir(Direction::XPos),
            Channel::Dir(Direction::XNeg),
            Channel::Dir(Direction::YPos),
            Channel::Dir(Direction::YNeg),
            Channel::Dir(Direction::ZPos),
            Channel::Dir(Direction::ZNeg),
        ];
        match self {
            Layout::Directional => &DIRECTIONAL,
            Layout::Undirected => &[Channel::Undirected],
        }
    }
}

/// A voxel array slot within a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    Dir(Direction),
    Undirected,
}

impl Channel {
    pub const COUNT: usize = 7;

    #[inline]
    pub fn slot(self) -> usize {
        match self {
            Channel::Dir(d) => d.index(),
            Channel::Undirected => 6,
        }
    }

    pub fn from_slot(slot: usize) -> Option<Channel> {
        match slot {
            0..=5 => Direction::from_index(slot).map(Channel::Dir),
            6 => Some(Channel::Undirected),
            _ => None,
        }
    }
}

/// Bit set over [`Channel`] slots.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ChannelSet(u8);

impl ChannelSet {
    pub const EMPTY: ChannelSet = ChannelSet(0);

    pub fn single(channel: Channel) -> ChannelSet {
        ChannelSet(1 << channel.slot())
    }

    pub fn from_bits(bits: u8) -> ChannelSet {
        ChannelSet(bits & 0x7f)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn insert(&mut self, channel: Channel) {
        self.0 |= 1 << channel.slot();
    }

    pub fn contains(self, channel: Channel) -> bool {
        self.0 & (1 << channel.slot()) != 0
    }

    pub fn union(self, other: ChannelSet) -> ChannelSet {
        ChannelSet(self.0 | other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Channel> {
        (0..Channel::COUNT)
            .filter(move |s| self.0 & (1 << s) != 0)
            .filter_map(Channel::from_slot)
    }
}

impl From<DirectionSet> for ChannelSet {
    fn from(set: DirectionSet) -> Self {
        ChannelSet(set.bits())
    }
}

/// Lattice cell containing `p`.
pub fn voxel_coord_of(p: &Point3<f64>, voxel_size: f64) -> VoxelCoord {
    [
        (p.x / voxel_size).floor() as i32,
        (p.y / voxel_size).floor() as i32,
        (p.z / voxel_size).floor() as i32,
    ]
}

/// World position of a voxel sample (the minimum corner of its cell).
pub fn position_of(v: VoxelCoord, voxel_size: f64) -> Point3<f64> {
    Point3::new(
        v[0] as f64 * voxel_size,
        v[1] as f64 * voxel_size,
        v[2] as f64 * voxel_size,
    )
}

/// Block holding a voxel, and the voxel's linear index inside that block.
#[inline]
pub fn block_of(v: VoxelCoord) -> (BlockCoord, usize) {
    let b = [
        v[0].div_euclid(BLOCK_SIDE),
        v[1].div_euclid(BLOCK_SIDE),
        v[2].div_euclid(BLOCK_SIDE),
    ];
    let l = [
        v[0].rem_euclid(BLOCK_SIDE),
        v[1].rem_euclid(BLOCK_SIDE),
        v[2].rem_euclid(BLOCK_SIDE),
    ];
    (b, local_index(l))
}

#[inline]
pub(crate) fn local_index(l: [i32; 3]) -> usize {
    (l[0] + BLOCK_SIDE * (l[1] + BLOCK_SIDE * l[2])) as usize
}

/// A B×B×B cube of voxels with lazily allocated per-channel arrays.
#[derive(Debug)]
pub struct VoxelBlock {
    coord: BlockCoord,
    arrays: [Option<Box<[Voxel]>>; Channel::COUNT],
    dirty: AtomicBool,
}

impl VoxelBlock {
    fn new(coord: BlockCoord) -> VoxelBlock {
        VoxelBlock {
            coord,
            arrays: Default::default(),
            dirty: AtomicBool::new(false),
        }
    }

    pub fn coord(&self) -> BlockCoord {
        self.coord
    }

    /// Global coordinate of the block's first voxel.
    pub fn origin(&self) -> VoxelCoord {
        [
            self.coord[0] * BLOCK_SIDE,
            self.coord[1] * BLOCK_SIDE,
            self.coord[2] * BLOCK_SIDE,
        ]
    }

    pub fn allocation_mask(&self) -> ChannelSet {
        let mut set = ChannelSet::EMPTY;
        for (slot, a) in self.arrays.iter().enumerate() {
            if a.is_some() {
                set.0 |= 1 << slot;
            }
        }
        set
    }

    pub fn array_count(&self) -> usize {
        self.arrays.iter().filter(|a| a.is_some()).count()
    }

    pub fn array(&self, channel: Channel) -> Option<&[Voxel]> {
        self.arrays[channel.slot()].as_deref()
    }

    pub fn array_mut(&mut self, channel: Channel) -> Option<&mut [Voxel]> {
        self.arrays[channel.slot()].as_deref_mut()
    }

    pub(crate) fn arrays_mut(&mut self) -> impl Iterator<Item = (Channel, &mut [Voxel])> {
        self.arrays
            .iter_mut()
            .enumerate()
            .filter_map(|(slot, a)| Some((Channel::from_slot(slot)?, a.as_deref_mut()?)))
    }

    fn ensure(&mut self, channel: Channel) -> bool {
        let slot = &mut self.arrays[channel.slot()];
        if slot.is_some() {
            return false;
        }
        *slot = Some(vec![Voxel::default(); BLOCK_VOXELS].into_boxed_slice());
        true
    }

    /// Flags the block as holding pending accumulations.
    #[inline]
    pub fn mark_dirty(&self) {
        if !self.dirty.load(Ordering::Relaxed) {
            self.dirty.store(true, Ordering::Relaxed);
        }
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty.load(Ordering::Relaxed)
    }

    /// Finalizes every voxel of every array; returns how many changed.
    pub fn finalize(&mut self, truncation: f64, max_weight: f64) -> usize {
        *self.dirty.get_mut() = false;
        let mut changed = 0;
        for (_, array) in self.arrays_mut() {
            for v in array.iter_mut() {
                changed += v.finalize(truncation, max_weight) as usize;
            }
        }
        changed
    }
}

/// Aggregate allocation statistics: number of blocks and mean voxel arrays per block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VoxelArrayStats {
    pub block_count: usize,
    pub mean_arrays_per_block: f64,
}

/// Hash-addressed sparse volume.
#[derive(Debug)]
pub struct BlockMap {
    blocks: HashMap<BlockCoord, VoxelBlock>,
    voxel_size: f64,
    truncation_factor: f64,
    layout: Layout,
    capacity: Option<usize>,
}

impl BlockMap {
    pub fn new(voxel_size: f64, truncation_factor: f64, layout: Layout) -> Result<BlockMap> {
        if !(voxel_size.is_finite() && voxel_size > 0.0) {
            return Err(Error::Config(format!("voxel size must be positive, got {voxel_size}")));
        }
        if !(truncation_factor.is_finite() && truncation_factor >= 1.0) {
            return Err(Error::Config(format!(
                "truncation factor must be at least 1, got {truncation_factor}"
            )));
        }
        Ok(BlockMap {
            blocks: HashMap::new(),
            voxel_size,
            truncation_factor,
            layout,
            capacity: None,
        })
    }

    /// Caps the number of blocks; allocation beyond it fails with [`Error::OutOfMemory`].
    pub fn with_block_capacity(mut self, max_blocks: usize) -> BlockMap {
        self.capacity = Some(max_blocks);
        self
    }

    pub fn voxel_size(&self) -> f64 {
        self.voxel_size
    }

    pub fn truncation_factor(&self) -> f64 {
        self.truncation_factor
    }

    /// Truncation distance tau in meters.
    pub fn truncation(&self) -> f64 {
        self.truncation_factor * self.voxel_size
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Makes sure the block and the requested arrays exist. Existing arrays are left untouched.
    pub fn allocate(&mut self, coord: BlockCoord, channels: ChannelSet) -> Result<&mut VoxelBlock> {
        for ch in channels.iter() {
            if !self.layout.channels().contains(&ch) {
                return Err(Error::Config(format!(
                    "channel {ch:?} is not part of a {:?} volume",
                    self.layout
                )));
            }
        }
        if !self.blocks.contains_key(&coord) {
            if let Some(capacity) = self.capacity {
                if self.blocks.len() >= capacity {
                    return Err(Error::OutOfMemory { capacity });
                }
            }
        }
        let block = self
            .blocks
            .entry(coord)
            .or_insert_with(|| VoxelBlock::new(coord));
        for ch in channels.iter() {
            block.ensure(ch);
        }
        Ok(block)
    }

    pub fn block(&self, coord: BlockCoord) -> Option<&VoxelBlock> {
        self.blocks.get(&coord)
    }

    pub fn block_mut(&mut self, coord: BlockCoord) -> Option<&mut VoxelBlock> {
        self.blocks.get_mut(&coord)
    }

    pub fn blocks(&self) -> impl Iterator<Item = &VoxelBlock> {
        self.blocks.values()
    }

    pub fn blocks_mut(&mut self) -> impl Iterator<Item = &mut VoxelBlock> {
        self.blocks.values_mut()
    }

    #[inline]
    pub fn voxel(&self, v: VoxelCoord, channel: Channel) -> Option<&Voxel> {
        let (b, i) = block_of(v);
        self.blocks.get(&b)?.array(channel).map(|a| &a[i])
    }

    pub fn voxel_mut(&mut self, v: VoxelCoord, channel: Channel) -> Option<&mut Voxel> {
        let (b, i) = block_of(v);
        self.blocks
            .get_mut(&b)?
            .array_mut(channel)
            .map(|a| &mut a[i])
    }

    /// Voxel whose lattice cell contains `p`.
    pub fn voxel_at(&self, p: &Point3<f64>, channel: Channel) -> Option<&Voxel> {
        self.voxel(voxel_coord_of(p, self.voxel_size), channel)
    }

    pub fn position_of(&self, v: VoxelCoord) -> Point3<f64> {
        position_of(v, self.voxel_size)
    }

    pub fn voxel_array_stats(&self) -> VoxelArrayStats {
        let block_count = self.blocks.len();
        let arrays: usize = self.blocks.values().map(VoxelBlock::array_count).sum();
        VoxelArrayStats {
            block_count,
            mean_arrays_per_block: if block_count == 0 {
                0.0
            } else {
                arrays as f64 / block_count as f64
            },
        }
    }

    /// Drops every block whose center lies farther than `radius` from `center`.
    pub fn recycle(&mut self, center: &Point3<f64>, radius: f64) -> usize {
        let half = BLOCK_SIDE as f64 * 0.5;
        let h = self.voxel_size;
        let before = self.blocks.len();
        self.blocks.retain(|c, _| {
            let mid = Point3::new(
                (c[0] as f64 * BLOCK_SIDE as f64 + half) * h,
                (c[1] as f64 * BLOCK_SIDE as f64 + half) * h,
                (c[2] as f64 * BLOCK_SIDE as f64 + half) * h,
            );
            (mid - center).norm() <= radius
        });
        before - self.blocks.len()
    }

    /// Finalizes all blocks that received accumulations; returns the number of updated voxels.
    pub fn finalize_dirty(&mut self, max_weight: f64) -> usize {
        let tau = self.truncation();
        let mut dirty: Vec<&mut VoxelBlock> =
            self.blocks.values_mut().filter(|b| b.is_dirty()).collect();
        par::map_mut(&mut dirty, |b| b.finalize(tau, max_weight))
            .into_iter()
            .sum()
    }
}
