//! Mesh extraction.
//!
//! [`classic_mc`] is plain marching cubes over the undirected TSDF. [`extract_mesh`] is the
//! directional variant: every cell derives one marching-cubes index per observed direction,
//! drops surfaces implausible for that direction, lets the directions vote on the remaining
//! hypotheses, intersects the survivors into at most two combined indices (one per facing
//! side, so both sheets of a thin wall survive) and regularizes the combined indices across
//! neighboring cells. Each cell owns the edges leaving its minimum corner along +x, +y and
//! +z and stores up to two vertices on each of them, one per surface side.

mod cell;
mod cube;
mod extract;
mod mesh;
mod regularize;
mod tables;

use std::time::Duration;

use crate::volume::DIRECTION_THRESHOLD;

pub use cell::{combine_indices, intra_directional_filter};
pub use cube::components;
pub use extract::{classic_mc, extract_mesh, extract_mesh_with_stats, mesh_volume};
pub use mesh::TriangleMesh;

#[derive(Clone, Debug, PartialEq)]
pub struct MeshConfig {
    /// Sine of the margin beyond a right angle within which a direction may observe a surface.
    pub direction_threshold: f64,
    /// A direction votes against surfaces in a cell when all its corner distances exceed this
    /// fraction of the truncation distance.
    pub front_fraction: f64,
    pub regularization_sweeps: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig {
            direction_threshold: DIRECTION_THRESHOLD,
            front_fraction: 0.5,
            regularization_sweeps: 2,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MeshStats {
    pub cells_with_surface: usize,
    /// Components compatible with neither combined slot.
    pub dropped_components: usize,
    /// Index bits flipped by regularization.
    pub regularized_bits: usize,
    pub vertices: usize,
    pub triangles: usize,
    pub elapsed: Duration,
}
