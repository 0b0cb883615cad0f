//! Sparse directional voxel volume.

mod direction;
mod map;
mod snapshot;
mod voxel;

pub use direction::{
    applicable_directions, applicable_directions_with, direction_weight, Direction, DirectionSet,
    DIRECTION_THRESHOLD,
};
pub use map::{
    block_of, position_of, voxel_coord_of, BlockCoord, BlockMap, Channel, ChannelSet, Layout,
    VoxelArrayStats, VoxelBlock, VoxelCoord, BLOCK_SIDE, BLOCK_VOXELS,
};
pub use snapshot::{read_snapshot, write_snapshot};
pub use voxel::Voxel;
