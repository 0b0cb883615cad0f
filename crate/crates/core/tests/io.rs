use dtsdf::fusion::{FusionConfig, FusionPreset};
use dtsdf::io::{
    depth_to_raw, export_mesh, load_config, read_ply, save_config, write_dataset, DatasetSource, MeshFormat,
    DEFAULT_DEPTH_SCALE,
};
use dtsdf::meshing::MeshConfig;
use dtsdf::pipeline::{fuse_frames, render_frames};
use dtsdf::scenes::ScenePreset;

#[test]
fn rendered_dataset_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = ScenePreset::Sphere.scene_file();
    file.trajectory.frames = 4;
    let frames = render_frames(&file);
    write_dataset(dir.path(), &frames, DEFAULT_DEPTH_SCALE).unwrap();
    let ds = DatasetSource::open(dir.path()).unwrap();
    assert_eq!(ds.len(), 4);
    for (i, f) in frames.iter().enumerate() {
        let g = ds.frame(i).unwrap();
        // Raw integers survive exactly; meters differ by at most half a unit.
        assert_eq!(depth_to_raw(&g, DEFAULT_DEPTH_SCALE).unwrap(), depth_to_raw(f, DEFAULT_DEPTH_SCALE).unwrap());
        let worst = f.depth.iter().zip(&g.depth).map(|(a, b)| (a - b).abs()).fold(0.0, f32::max);
        assert!(worst as f64 <= 0.5 * DEFAULT_DEPTH_SCALE + 1e-6);
        assert!((g.pose.translation.vector - f.pose.translation.vector).norm() < 1e-12);
        assert!(g.pose.rotation.angle_to(&f.pose.rotation) < 1e-9);
    }
}

#[test]
fn fused_mesh_survives_ply() {
    let dir = tempfile::tempdir().unwrap();
    let mut file = ScenePreset::Sphere.scene_file();
    file.trajectory.frames = 3;
    let cfg = FusionConfig::from_preset(FusionPreset::DirRcnP2pl, 0.02);
    let (map, _) = fuse_frames(&render_frames(&file), &cfg).unwrap();
    let mesh = dtsdf::meshing::mesh_volume(&map, &MeshConfig::default()).unwrap();
    assert!(!mesh.is_empty());
    let path = dir.path().join("m.ply");
    export_mesh(&mesh, &path, MeshFormat::Ply).unwrap();
    let back = read_ply(&path).unwrap();
    assert_eq!(back.triangles, mesh.triangles);
    for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
        for k in 0..3 {
            assert_eq!(a[k], b[k] as f32 as f64);
        }
    }
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fusion.cfg");
    for p in FusionPreset::ALL {
        let cfg = FusionConfig::from_preset(p, 0.02);
        save_config(&path, &cfg).unwrap();
        assert_eq!(load_config(&path).unwrap(), cfg);
    }
}
