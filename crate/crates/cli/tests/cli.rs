use std::path::Path;
use std::process::{Command, Output};

fn dtsdf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtsdf")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = dtsdf(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    dtsdf(args).status.code().unwrap()
}

fn value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from {report}"))
        .parse()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn render_writes_a_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a/b/ds");
    ok(&["render", "--scene", "sphere", "--frames", "4", "--out", s(&out)]);
    let pngs = std::fs::read_dir(out.join("depth")).unwrap().count();
    assert_eq!(pngs, 4);
    let traj = std::fs::read_to_string(out.join("groundtruth.txt")).unwrap();
    assert_eq!(traj.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn empty_scene_renders_invalid_depth() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("empty.toml");
    std::fs::write(&scene, "[trajectory]\nframes = 2\n").unwrap();
    let out = dir.path().join("ds");
    ok(&["render", "--scene", s(&scene), "--out", s(&out)]);
    let (_, _, raw) = dtsdf::io::load_depth_raw(&out.join("depth/000001.png")).unwrap();
    assert!(raw.iter().all(|&r| r == 0));
}

#[test]
fn bad_scene_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("bad.toml");
    std::fs::write(&scene, "[[shape]]\nkind = \"sphere\"\nradius = -1\ncenter = [0, 0, 0]\n").unwrap();
    assert_eq!(code(&["render", "--scene", s(&scene), "--out", s(dir.path())]), 3);
}

#[test]
fn fuse_mesh_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    let vol = dir.path().join("v.snap");
    let mesh = dir.path().join("m.ply");
    ok(&["render", "--scene", "sphere", "--frames", "6", "--out", s(&ds)]);
    let fused = ok(&[
        "fuse", "--dataset", s(&ds), "--mode", "dir-rcn-p2pl", "--voxel-size", "0.02", "--out", s(&vol), "--mesh-every", "3",
    ]);
    assert!(value(&fused, "blocks") > 0.0);
    assert!(value(&fused, "meshing_fraction") > 0.0);
    let meshed = ok(&["mesh", "--volume", s(&vol), "--out", s(&mesh)]);
    assert!(value(&meshed, "triangles") > 0.0);

    let heat = dir.path().join("heat.ply");
    let report = ok(&["eval", "--mesh", s(&mesh), "--reference", s(&ds.join("scene.toml")), "--heatmap", s(&heat)]);
    assert!(value(&report, "rmse") < 0.01);
    let header = std::fs::read(&heat).unwrap();
    assert!(String::from_utf8_lossy(&header).contains("property uchar red"));

    let same = ok(&["eval", "--mesh", s(&mesh), "--reference", s(&mesh)]);
    assert_eq!(value(&same, "rmse"), 0.0);

    assert_eq!(code(&["mesh", "--volume", s(&vol), "--out", s(&mesh), "--baseline"]), 3);
    assert_eq!(code(&["eval", "--mesh", s(&mesh), "--reference", s(&dir.path().join("none.ply"))]), 3);
    assert_eq!(code(&["mesh", "--volume", s(&dir.path().join("none.snap")), "--out", s(&mesh)]), 3);
}

#[test]
fn single_plane_frame_allocates_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let scene = dir.path().join("plane.toml");
    std::fs::write(
        &scene,
        "[[shape]]\nkind = \"plane\"\npoint = [0.0, 0.0, -0.3]\nnormal = [0.0, 0.0, 1.0]\n\n[trajectory]\nframes = 1\n",
    )
    .unwrap();
    let ds = dir.path().join("ds");
    ok(&["render", "--scene", s(&scene), "--out", s(&ds)]);
    let fused = ok(&["fuse", "--dataset", s(&ds), "--mode", "dir-rcn-p2pl", "--out", s(&dir.path().join("v.snap"))]);
    assert!(value(&fused, "blocks") > 0.0);
}

#[test]
fn zero_frames_give_an_empty_volume_and_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    dtsdf::io::write_dataset(&ds, &[], dtsdf::io::DEFAULT_DEPTH_SCALE).unwrap();
    let vol = dir.path().join("v.snap");
    let out = dtsdf(&["fuse", "--dataset", s(&ds), "--mode", "def-vp", "--out", s(&vol)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no frames"));
    assert_eq!(value(&String::from_utf8(out.stdout).unwrap(), "blocks"), 0.0);
    let mesh = dir.path().join("m.obj");
    let meshed = ok(&["mesh", "--volume", s(&vol), "--out", s(&mesh), "--baseline"]);
    assert_eq!(value(&meshed, "triangles"), 0.0);
    assert!(mesh.exists());
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = s(dir.path());
    assert_eq!(code(&["fuse", "--dataset", out, "--mode", "fast", "--out", out]), 2);
    assert_eq!(code(&["fuse", "--dataset", out, "--voxel-size", "-1", "--out", out]), 2);
    assert_eq!(code(&["sweep", "--scenes", "sphere", "--modes", "", "--voxel-sizes", "0.02"]), 2);
    assert_eq!(code(&["render", "--scene", "sphere", "--out", out, "--threads", "0"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn config_file_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    ok(&["render", "--scene", "sphere", "--frames", "1", "--out", s(&ds)]);
    let cfg = dir.path().join("f.cfg");
    std::fs::write(&cfg, "voxel_size = 0.04\nmode = vp\nmetric = p2p\ndirectional = false\n").unwrap();
    let fused = ok(&["fuse", "--dataset", s(&ds), "--config", s(&cfg), "--out", s(&dir.path().join("v.snap"))]);
    assert!(fused.contains("mode=def-vp"));
    assert_eq!(value(&fused, "voxel_size"), 0.04);
    std::fs::write(&cfg, "voxel_sise = 0.04\n").unwrap();
    assert_eq!(code(&["fuse", "--dataset", s(&ds), "--config", s(&cfg), "--out", s(&dir.path().join("v.snap"))]), 3);
}

#[test]
fn sweep_is_a_deterministic_table() {
    let args = [
        "sweep", "--scenes", "slab", "--modes", "def-vp,dir-rcn-p2pl", "--voxel-sizes", "0.02,0.04", "--frames", "6",
        "--threads", "2",
    ];
    let a = ok(&args);
    let b = ok(&args);
    let rows = |t: &str| -> Vec<Vec<String>> {
        t.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
    };
    let (ra, rb) = (rows(&a), rows(&b));
    assert_eq!(ra.len(), 4);
    let header: Vec<&str> = a.lines().next().unwrap().split(',').collect();
    for (x, y) in ra.iter().zip(&rb) {
        assert_eq!(x[3], "ok");
        for (k, name) in header.iter().enumerate() {
            if name.ends_with("_ms") || name.ends_with("_ms_per_frame") {
                continue;
            }
            match (x[k].parse::<f64>(), y[k].parse::<f64>()) {
                (Ok(u), Ok(v)) => assert!((u - v).abs() <= 1e-6, "{name}: {u} vs {v}"),
                _ => assert_eq!(x[k], y[k]),
            }
        }
    }
}

#[test]
fn sweep_records_failures_and_continues() {
    let out = ok(&["sweep", "--scenes", "missing.toml,sphere", "--modes", "def-vp", "--voxel-sizes", "0.04", "--frames", "2"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains("error"));
    assert!(lines[2].contains(",ok,"));
}
