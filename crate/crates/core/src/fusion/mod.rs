//! Depth-frame integration: voxel projection, line-of-sight ray casting and ray casting along
//! surface normals, all funnelled through the two-phase accumulate/finalize update.

mod config;
mod frame;
mod integrate;
mod normals;
mod traversal;
mod weights;

pub use config::{BilateralParams, DistanceMetric, FusionConfig, FusionMode, FusionPreset};
pub use frame::{DepthFrame, DepthRange, Intrinsics};
pub use integrate::{fuse_frame, integrate, FusionStats};
pub use normals::{bilateral_filter, estimate_normals, NormalMap};
pub use traversal::{traverse_voxels, VoxelTraversal};
pub use weights::{angle_weight, depth_weight, fusion_weight, point_to_plane, REFERENCE_DEPTH};
