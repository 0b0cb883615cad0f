use std::collections::HashMap;
use std::time::{Duration, Instant};

use nalgebra::{Point3, Vector3};

use super::config::{DistanceMetric, FusionConfig, FusionMode};
use super::frame::DepthFrame;
use super::normals::{estimate_normals, NormalMap};
use super::traversal::VoxelTraversal;
use super::weights::{depth_weight, fusion_weight};
use crate::error::{Error, Result};
use crate::par;
use crate::volume::{
    applicable_directions_with, block_of, position_of, BlockCoord, BlockMap, Channel, ChannelSet,
    VoxelBlock, BLOCK_SIDE, BLOCK_VOXELS,
};

/// Work and wall-clock breakdown of one fused frame.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FusionStats {
    /// Pixels that produced a measurement.
    pub pixels_processed: usize,
    /// Individual accumulations into voxel slots.
    pub updates: usize,
    /// Voxels whose running average changed.
    pub voxels_touched: usize,
    /// Blocks newly created by this frame.
    pub blocks_allocated: usize,
    pub preprocess: Duration,
    pub allocate: Duration,
    pub fuse: Duration,
    pub finalize: Duration,
}

impl FusionStats {
    pub fn total(&self) -> Duration {
        self.preprocess + self.allocate + self.fuse + self.finalize
    }
}

/// A valid pixel lifted to world space.
#[derive(Clone, Copy, Debug)]
struct Sample {
    u: u32,
    v: u32,
    /// Depth along the optical axis.
    z: f64,
    p: Point3<f64>,
    /// Outward (camera-facing) world normal, if known.
    n: Option<Vector3<f64>>,
    /// Unit viewing direction from the camera center to `p`.
    view: Vector3<f64>,
    /// Distance from the camera center to `p`.
    range: f64,
    /// Camera-frame z component of the normal.
    n_cam_z: f64,
    targets: [(Channel, f64); 3],
    target_count: u8,
}

impl Sample {
    fn targets(&self) -> &[(Channel, f64)] {
        &self.targets[..self.target_count as usize]
    }

    fn channels(&self) -> ChannelSet {
        let mut set = ChannelSet::EMPTY;
        for &(c, _) in self.targets() {
            set.insert(c);
        }
        set
    }
}

/// Fuses one depth frame into `map`.
///
/// `normals` are camera-frame normals of `frame`; they are required unless the configuration
/// is the classic voxel-projection TSDF with point-to-point distances.
pub fn fuse_frame(
    map: &mut BlockMap,
    frame: &DepthFrame,
    normals: Option<&NormalMap>,
    cfg: &FusionConfig,
) -> Result<FusionStats> {
    cfg.validate()?;
    frame.validate()?;
    check_volume(map, cfg)?;
    if cfg.requires_normals() && normals.is_none() {
        return Err(Error::Config(
            "this fusion mode needs a normal map but none was supplied".into(),
        ));
    }
    if let Some(nm) = normals {
        if nm.width != frame.width || nm.height != frame.height {
            return Err(Error::Input(format!(
                "normal map is {}x{} but the frame is {}x{}",
                nm.width, nm.height, frame.width, frame.height
            )));
        }
    }
    let mut stats = FusionStats::default();

    let t = Instant::now();
    let samples = preprocess(frame, normals, cfg);
    stats.pixels_processed = samples.len();
    stats.preprocess = t.elapsed();

    let t = Instant::now();
    let before = map.len();
    allocate(map, &samples, cfg)?;
    stats.blocks_allocated = map.len() - before;
    stats.allocate = t.elapsed();

    let t = Instant::now();
    stats.updates = match cfg.mode {
        FusionMode::VoxelProjection => write_projection(map, frame, &samples, cfg),
        FusionMode::RayCasting | FusionMode::NormalRayCasting => write_rays(map, &samples, cfg),
    };
    stats.fuse = t.elapsed();

    let t = Instant::now();
    stats.voxels_touched = map.finalize_dirty(cfg.max_voxel_weight);
    stats.finalize = t.elapsed();
    log::debug!(
        "fused frame: {} pixels, {} updates, {} voxels, {} new blocks",
        stats.pixels_processed,
        stats.updates,
        stats.voxels_touched,
        stats.blocks_allocated
    );
    Ok(stats)
}

/// Estimates normals when the configuration needs them, then fuses the frame.
/// Normal estimation time is reported as part of preprocessing.
pub fn integrate(map: &mut BlockMap, frame: &DepthFrame, cfg: &FusionConfig) -> Result<FusionStats> {
    let t = Instant::now();
    let normals = cfg.requires_normals().then(|| estimate_normals(frame, cfg));
    let normal_time = t.elapsed();
    let mut stats = fuse_frame(map, frame, normals.as_ref(), cfg)?;
    stats.preprocess += normal_time;
    Ok(stats)
}

fn check_volume(map: &BlockMap, cfg: &FusionConfig) -> Result<()> {
    let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    if !same(map.voxel_size(), cfg.voxel_size) || !same(map.truncation_factor(), cfg.truncation_factor) {
        return Err(Error::Config(format!(
            "volume has voxel size {} and truncation factor {}, configuration asks for {} and {}",
            map.voxel_size(),
            map.truncation_factor(),
            cfg.voxel_size,
            cfg.truncation_factor
        )));
    }
    if map.layout() != cfg.layout() {
        return Err(Error::Config(format!(
            "volume layout {:?} does not match configuration layout {:?}",
            map.layout(),
            cfg.layout()
        )));
    }
    Ok(())
}

fn preprocess(frame: &DepthFrame, normals: Option<&NormalMap>, cfg: &FusionConfig) -> Vec<Sample> {
    let rot = frame.pose.rotation;
    let center = frame.camera_center();
    let rows = par::map_range(frame.height, |v| {
        let mut row = Vec::new();
        for u in 0..frame.width {
            let Some(z) = frame.depth(u, v, &cfg.depth_range) else { continue };
            let n_cam = match normals {
                Some(nm) => match nm.get(u, v) {
                    Some(n) => Some(n),
                    None => continue,
                },
                None => None,
            };
            let p = frame.pose * frame.backproject(u as f64, v as f64, z);
            let ray = p - center;
            let range = ray.norm();
            let view = ray / range;
            let n = n_cam.map(|n| rot * n);
            let mut s = Sample {
                u: u as u32,
                v: v as u32,
                z,
                p,
                n,
                view,
                range,
                n_cam_z: n_cam.map_or(0.0, |n| n.z),
                targets: [(Channel::Undirected, 0.0); 3],
                target_count: 0,
            };
            match (cfg.directional, n) {
                (true, Some(n)) => {
                    for d in applicable_directions_with(&n, cfg.direction_threshold).iter() {
                        let w = fusion_weight(z, &n, &view, Some(d), cfg.max_sample_weight);
                        if w > 0.0 && (s.target_count as usize) < 3 {
                            s.targets[s.target_count as usize] = (Channel::Dir(d), w);
                            s.target_count += 1;
                        }
                    }
                }
                (false, Some(n)) => {
                    let w = fusion_weight(z, &n, &view, None, cfg.max_sample_weight);
                    if w > 0.0 {
                        s.targets[0] = (Channel::Undirected, w);
                        s.target_count = 1;
                    }
                }
                (false, None) => {
                    s.targets[0] = (Channel::Undirected, depth_weight(z).min(cfg.max_sample_weight));
                    s.target_count = 1;
                }
                (true, None) => {}
            }
            if s.target_count > 0 {
                row.push(s);
            }
        }
        row
    });
    rows.concat()
}

/// The truncation segment of a sample as `(origin, direction, t_min, t_max)`.
fn segment(s: &Sample, center: &Point3<f64>, cfg: &FusionConfig) -> (Point3<f64>, Vector3<f64>, f64, f64) {
    let tau = cfg.truncation();
    let range = cfg.depth_range;
    match (cfg.mode, s.n) {
        (FusionMode::NormalRayCasting, Some(n)) => {
            // Depth along the optical axis at p + t n is z + t n_z.
            let (mut lo, mut hi) = (-tau, tau);
            if s.n_cam_z != 0.0 {
                let a = (range.min - s.z) / s.n_cam_z;
                let b = (range.max - s.z) / s.n_cam_z;
                lo = lo.max(a.min(b));
                hi = hi.min(a.max(b));
            }
            (s.p, n, lo, hi)
        }
        _ => {
            let cos = s.z / s.range;
            let lo = (s.range - tau).max(range.min / cos);
            let hi = (s.range + tau).min(range.max / cos);
            (*center, s.view, lo, hi)
        }
    }
}

/// Voxels whose sample lies nearest to the segment cells, i.e. a walk over the lattice shifted
/// by half a voxel.
fn segment_voxels(
    origin: &Point3<f64>,
    dir: &Vector3<f64>,
    t0: f64,
    t1: f64,
    h: f64,
) -> VoxelTraversal {
    let shifted = origin + Vector3::repeat(0.5 * h);
    VoxelTraversal::new(&shifted, dir, t0, t1, h)
}

fn allocate(map: &mut BlockMap, samples: &[Sample], cfg: &FusionConfig) -> Result<()> {
    let h = cfg.voxel_size;
    let needed = par::fold_range(
        samples.len(),
        HashMap::<BlockCoord, ChannelSet>::new,
        |mut acc, i| {
            let s = &samples[i];
            let channels = s.channels();
            let cam = s.p - s.view * s.range;
            let (o, d, t0, t1) = segment(s, &cam, cfg);
            let mut last = None;
            for v in segment_voxels(&o, &d, t0, t1, h) {
                let (b, _) = block_of(v);
                if last == Some(b) {
                    continue;
                }
                last = Some(b);
                let e = acc.entry(b).or_insert(ChannelSet::EMPTY);
                *e = e.union(channels);
            }
            acc
        },
        |a, b| if a.len() >= b.len() { merge(a, b) } else { merge(b, a) },
    );
    let mut coords: Vec<_> = needed.into_iter().collect();
    coords.sort_unstable_by_key(|(c, _)| *c);
    for (coord, channels) in coords {
        map.allocate(coord, channels)?;
    }
    Ok(())
}

fn merge(
    mut a: HashMap<BlockCoord, ChannelSet>,
    b: HashMap<BlockCoord, ChannelSet>,
) -> HashMap<BlockCoord, ChannelSet> {
    for (k, v) in b {
        let e = a.entry(k).or_insert(ChannelSet::EMPTY);
        *e = e.union(v);
    }
    a
}

/// Signed distance of voxel position `x` for the sample, positive on the camera side.
#[inline]
fn distance(s: &Sample, x: &Point3<f64>, cfg: &FusionConfig) -> f64 {
    match (cfg.metric, s.n) {
        (DistanceMetric::PointToPlane, Some(n)) => (x - s.p).dot(&n),
        _ => match (cfg.mode, s.n) {
            (FusionMode::NormalRayCasting, Some(n)) => {
                let r = x - s.p;
                r.norm().copysign(r.dot(&n))
            }
            // Distance along the line of sight.
            _ => s.range - (x - (s.p - s.view * s.range)).dot(&s.view),
        },
    }
}

fn write_rays(map: &BlockMap, samples: &[Sample], cfg: &FusionConfig) -> usize {
    let h = cfg.voxel_size;
    let tau = cfg.truncation();
    par::fold_range(
        samples.len(),
        || 0usize,
        |mut count, i| {
            let s = &samples[i];
            let cam = s.p - s.view * s.range;
            let (o, d, t0, t1) = segment(s, &cam, cfg);
            let mut cached: Option<(BlockCoord, &VoxelBlock)> = None;
            for v in segment_voxels(&o, &d, t0, t1, h) {
                let x = position_of(v, h);
                let value = distance(s, &x, cfg);
                if !(value.abs() <= tau) {
                    continue;
                }
                let (b, idx) = block_of(v);
                let block = match cached {
                    Some((c, blk)) if c == b => blk,
                    _ => match map.block(b) {
                        Some(blk) => {
                            cached = Some((b, blk));
                            blk
                        }
                        None => continue,
                    },
                };
                for &(channel, w) in s.targets() {
                    if let Some(array) = block.array(channel) {
                        array[idx].accumulate(value, w);
                        count += 1;
                    }
                }
                block.mark_dirty();
            }
            count
        },
        |a, b| a + b,
    )
}

fn write_projection(map: &BlockMap, frame: &DepthFrame, samples: &[Sample], cfg: &FusionConfig) -> usize {
    let h = cfg.voxel_size;
    let tau = cfg.truncation();
    let (w, hgt) = (frame.width, frame.height);
    // Pixel -> sample lookup.
    let mut lookup = vec![u32::MAX; w * hgt];
    for (i, s) in samples.iter().enumerate() {
        lookup[s.v as usize * w + s.u as usize] = i as u32;
    }
    let world_to_cam = frame.pose.inverse();
    let blocks: Vec<&VoxelBlock> = map.blocks().collect();
    par::map_slice(&blocks, |block| {
        let mask = block.allocation_mask();
        let origin = block.origin();
        let mut count = 0;
        let mut touched = false;
        for idx in 0..BLOCK_VOXELS {
            let l = [
                idx as i32 % BLOCK_SIDE,
                (idx as i32 / BLOCK_SIDE) % BLOCK_SIDE,
                idx as i32 / (BLOCK_SIDE * BLOCK_SIDE),
            ];
            let v = [origin[0] + l[0], origin[1] + l[1], origin[2] + l[2]];
            let x = position_of(v, h);
            let xc = world_to_cam * x;
            let Some((pu, pv)) = frame.project(&xc) else { continue };
            let (pu, pv) = (pu.round(), pv.round());
            if pu < 0.0 || pv < 0.0 || pu >= w as f64 || pv >= hgt as f64 {
                continue;
            }
            let si = lookup[pv as usize * w + pu as usize];
            if si == u32::MAX {
                continue;
            }
            let s = &samples[si as usize];
            let value = match (cfg.metric, s.n) {
                (DistanceMetric::PointToPlane, Some(n)) => (x - s.p).dot(&n),
                _ => s.z - xc.z,
            };
            if !(value.abs() <= tau) {
                continue;
            }
            for &(channel, wt) in s.targets() {
                if !mask.contains(channel) {
                    continue;
                }
                if let Some(array) = block.array(channel) {
                    array[idx].accumulate(value, wt);
                    count += 1;
                    touched = true;
                }
            }
        }
        if touched {
            block.mark_dirty();
        }
        count
    })
    .into_iter()
    .sum()
}
