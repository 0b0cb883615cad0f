//! End-to-end runs: render, fuse, mesh and evaluate a synthetic scene.

use std::time::{Duration, Instant};

use crate::error::Result;
use crate::eval::{mesh_to_reference_distances, DistanceReport, Reference};
use crate::fusion::{integrate, DepthFrame, FusionConfig, FusionStats};
use crate::meshing::{mesh_volume, MeshConfig, TriangleMesh};
use crate::par;
use crate::scenes::{render_depth, SceneFile};
use crate::volume::BlockMap;

/// Renders every frame of the scene file's trajectory.
pub fn render_frames(file: &SceneFile) -> Vec<DepthFrame> {
    let poses = file.poses();
    par::map_range(poses.len(), |i| render_depth(&file.scene, &poses[i], &file.render_options(i)))
}

/// Fuses frames in order into a fresh volume.
pub fn fuse_frames(frames: &[DepthFrame], cfg: &FusionConfig) -> Result<(BlockMap, Vec<FusionStats>)> {
    cfg.validate()?;
    let mut map = BlockMap::new(cfg.voxel_size, cfg.truncation_factor, cfg.layout())?;
    let mut stats = Vec::with_capacity(frames.len());
    for frame in frames {
        stats.push(integrate(&mut map, frame, cfg)?);
    }
    Ok((map, stats))
}

#[derive(Debug)]
pub struct RunOutput {
    pub volume: BlockMap,
    pub mesh: TriangleMesh,
    pub fusion: Vec<FusionStats>,
    pub meshing: Duration,
    /// `None` when the mesh is empty.
    pub distances: Option<DistanceReport>,
}

/// Fuses pre-rendered frames, meshes the volume and measures it against the analytic scene.
pub fn run_frames(file: &SceneFile, frames: &[DepthFrame], cfg: &FusionConfig, mesh_cfg: &MeshConfig) -> Result<RunOutput> {
    let (volume, fusion) = fuse_frames(frames, cfg)?;
    let start = Instant::now();
    let mesh = mesh_volume(&volume, mesh_cfg)?;
    let meshing = start.elapsed();
    let distances = if mesh.vertex_count() == 0 {
        None
    } else {
        Some(mesh_to_reference_distances(&mesh, &Reference::Analytic(file.scene.clone()))?)
    };
    Ok(RunOutput { volume, mesh, fusion, meshing, distances })
}

/// [`run_frames`] on freshly rendered frames, on `threads` workers.
pub fn run_scene(file: &SceneFile, cfg: &FusionConfig, mesh_cfg: &MeshConfig, threads: Option<usize>) -> Result<RunOutput> {
    par::with_threads(threads, || {
        let frames = render_frames(file);
        run_frames(file, &frames, cfg, mesh_cfg)
    })
}
