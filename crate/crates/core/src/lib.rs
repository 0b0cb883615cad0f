//! Directional truncated signed distance fields.
//!
//! Depth frames are fused into a sparse, hash-addressed voxel volume in which every block
//! carries up to six voxel arrays, one per coordinate-axis direction. Each measurement is
//! routed to the directions its surface normal faces, so opposite sides of thin structures
//! never overwrite each other. Meshes are recovered with a directional variant of marching
//! cubes that filters, votes on, and intersects the per-direction surface hypotheses.
//!
//! The classic undirected TSDF (voxel projection plus marching cubes) is implemented alongside
//! as a baseline, together with a synthetic depth renderer and an RMSE evaluation harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod eval;
pub mod fusion;
pub mod io;
pub mod meshing;
pub mod par;
pub mod pipeline;
pub mod scenes;
pub mod volume;

pub use error::{Error, Result};
pub use fusion::{
    estimate_normals, fuse_frame, integrate, DepthFrame, DistanceMetric, FusionConfig, FusionMode,
    FusionPreset, FusionStats, Intrinsics, NormalMap,
};
pub use meshing::{classic_mc, extract_mesh, MeshConfig, TriangleMesh};
pub use scenes::{render_depth, Scene};
pub use volume::{BlockMap, Channel, Direction, DirectionSet, Layout, Voxel};
