mod common;

use dtsdf::fusion::{integrate, traverse_voxels, FusionConfig, FusionPreset};
use dtsdf::scenes::{look_at, render_depth, RenderOptions, Scene, Shape};
use dtsdf::volume::{BlockMap, Channel, Direction, BLOCK_SIDE};
use dtsdf::DepthFrame;
use nalgebra::{Point3, Vector3};
use proptest::prelude::*;

fn tilted_plane() -> (Scene, Vector3<f64>, DepthFrame) {
    let normal = Vector3::new(0.2, -0.3, 1.0).normalize();
    let scene = Scene::new(vec![Shape::plane(Point3::origin(), normal)]);
    let pose = look_at(&Point3::new(0.1, 0.05, 1.2), &Point3::origin());
    let frame = render_depth(&scene, &pose, &RenderOptions::default());
    (scene, normal, frame)
}

fn observed(map: &BlockMap) -> Vec<(Channel, [i32; 3], f64, f64)> {
    let mut out = Vec::new();
    for block in map.blocks() {
        let o = block.origin();
        for ch in block.allocation_mask().iter() {
            let voxels = block.array(ch).unwrap();
            for k in 0..BLOCK_SIDE {
                for j in 0..BLOCK_SIDE {
                    for i in 0..BLOCK_SIDE {
                        let v = &voxels[(i + BLOCK_SIDE * (j + BLOCK_SIDE * k)) as usize];
                        if v.weight > 0.0 {
                            out.push((ch, [o[0] + i, o[1] + j, o[2] + k], v.sdf, v.weight));
                        }
                    }
                }
            }
        }
    }
    out.sort_by_key(|a| (a.0.slot(), a.1));
    out
}

#[test]
fn normal_ray_casting_recovers_plane_distance() {
    let (scene, _, frame) = tilted_plane();
    let cfg = FusionConfig::from_preset(FusionPreset::DirRcnP2pl, 0.01);
    let mut map = BlockMap::new(cfg.voxel_size, cfg.truncation_factor, cfg.layout()).unwrap();
    integrate(&mut map, &frame, &cfg).unwrap();
    let voxels = observed(&map);
    assert!(voxels.len() > 10_000);
    let tau = cfg.truncation();
    let mut checked = 0;
    for (ch, v, sdf, _) in &voxels {
        assert_eq!(*ch, Channel::Dir(Direction::ZPos));
        let truth = scene.sdf(&map.position_of(*v));
        if truth.abs() < 0.5 * tau {
            assert!((sdf - truth).abs() < 1e-4, "voxel {v:?}: {sdf} vs {truth}");
            checked += 1;
        }
    }
    assert!(checked > 5_000);
}

#[test]
fn repeated_frame_is_a_fixed_point() {
    let (_, _, frame) = tilted_plane();
    for preset in [FusionPreset::DirRcnP2pl, FusionPreset::DefVp] {
        let cfg = FusionConfig::from_preset(preset, 0.02);
        let mut map = BlockMap::new(cfg.voxel_size, cfg.truncation_factor, cfg.layout()).unwrap();
        integrate(&mut map, &frame, &cfg).unwrap();
        let once = observed(&map);
        for _ in 1..10 {
            integrate(&mut map, &frame, &cfg).unwrap();
        }
        let ten = observed(&map);
        assert_eq!(once.len(), ten.len());
        for (a, b) in once.iter().zip(&ten) {
            assert_eq!((a.0, a.1), (b.0, b.1));
            assert!((a.2 - b.2).abs() < 1e-9, "{preset}: {} vs {}", a.2, b.2);
            let w = (10.0 * a.3).min(cfg.max_voxel_weight);
            assert!((b.3 - w).abs() < 1e-9 * w);
        }
    }
}

#[test]
fn empty_frame_changes_nothing() {
    let scene = Scene::new(vec![]);
    let frame = render_depth(&scene, &look_at(&Point3::new(0.0, 0.0, 1.0), &Point3::origin()), &RenderOptions::default());
    let cfg = FusionConfig::default();
    let mut map = BlockMap::new(cfg.voxel_size, cfg.truncation_factor, cfg.layout()).unwrap();
    let stats = integrate(&mut map, &frame, &cfg).unwrap();
    assert_eq!(stats.pixels_processed, 0);
    assert!(map.is_empty());
}

proptest! {
    #[test]
    fn traversal_matches_oracle(
        o in prop::array::uniform3(-1.0f64..1.0),
        d in prop::array::uniform3(-1.0f64..1.0),
        t0 in -0.5f64..0.5,
        len in 0.0f64..1.0,
        h in prop::sample::select(vec![0.01, 0.02, 0.05]),
    ) {
        let d = Vector3::from(d);
        prop_assume!(d.norm() > 1e-3);
        let o = Point3::from(o);
        let got = traverse_voxels(&o, &d, t0, t0 + len, h);
        let want: Vec<[i32; 3]> = common::traversal_oracle(&o, &d, t0, t0 + len, h)
            .into_iter()
            .map(|c| [c[0] as i32, c[1] as i32, c[2] as i32])
            .collect();
        prop_assert_eq!(&got, &want);
        for w in got.windows(2) {
            prop_assert!((0..3).all(|a| (w[0][a] - w[1][a]).abs() <= 1));
        }
    }
}
