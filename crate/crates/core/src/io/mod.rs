//! File formats: depth images, trajectories, datasets, meshes and configuration.

mod config;
mod dataset;
mod depth;
mod mesh;
mod trajectory;

pub use config::{format_config, load_config, metric_name, mode_name, parse_config, save_config};
pub use dataset::{write_dataset, DatasetEntry, DatasetSource, FRAME_INTERVAL, MAX_ASSOCIATION_GAP};
pub use depth::{depth_to_raw, load_depth_image, load_depth_raw, save_depth_image, DEFAULT_DEPTH_SCALE};
pub use mesh::{colormap, export_mesh, load_mesh, obj_text, read_obj, read_ply, save_mesh, write_ply, MeshFormat};
pub use trajectory::{format_trajectory, load_trajectory, parse_trajectory, save_trajectory, StampedPose};
