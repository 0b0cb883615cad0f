//! Reconstruction quality and timing measurements.
//!
//! Distances are directed: every vertex of the reconstruction is measured against the reference
//! surface, which is either an analytic scene or a triangle mesh behind a closest-point index.

mod bvh;
mod distance;
mod sheets;
mod timing;

pub use bvh::{closest_point_on_triangle, MeshIndex};
pub use distance::{heatmap_scalars, mesh_to_reference_distances, DistanceReport, Reference};
pub use sheets::{sheet_thickness, SheetReport};
pub use timing::{timing_report, TimingReport};
