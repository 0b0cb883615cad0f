use dtsdf::scenes::{look_at, render_depth, RenderOptions, Scene, SceneFile, ScenePreset};
use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn raycast_hits_lie_on_the_surface() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for preset in ScenePreset::ALL {
        let scene = preset.scene();
        let mut hits = 0;
        for _ in 0..2000 {
            let o = Point3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            if scene.sdf(&o) <= 0.0 {
                continue;
            }
            let d = (Point3::new(rng.random_range(-0.3..0.3), rng.random_range(-0.7..0.3), rng.random_range(-0.3..0.3)) - o)
                .normalize();
            if let Some(t) = scene.raycast(&o, &d, 0.0) {
                hits += 1;
                let p = o + d * t;
                assert!(scene.sdf(&p).abs() < 1e-9, "{preset}: sdf {}", scene.sdf(&p));
                // Nothing is crossed before the hit.
                for k in 1..20 {
                    assert!(scene.sdf(&(o + d * (t * k as f64 / 20.0 - 1e-9))) > -1e-9);
                }
            }
        }
        assert!(hits > 100, "{preset}: {hits}");
    }
}

#[test]
fn look_at_points_the_optical_axis() {
    let eye = Point3::new(2.0, -1.0, 0.5);
    let pose = look_at(&eye, &Point3::origin());
    let forward = pose.rotation * Vector3::z();
    assert!((forward - (-eye.coords).normalize()).norm() < 1e-12);
    // Image rows run downwards in the world.
    assert!((pose.rotation * Vector3::y()).z < 0.0);
}

#[test]
fn rendered_depth_matches_sphere_distance() {
    let scene = Scene::sphere();
    let eye = Point3::new(0.0, -2.0, 0.0);
    let frame = render_depth(&scene, &look_at(&eye, &Point3::origin()), &RenderOptions::default());
    let center = frame.depth[(frame.height / 2) * frame.width + frame.width / 2] as f64;
    assert!(center > 1.49 && center < 1.51);
    let corner = frame.depth[0];
    assert_eq!(corner, 0.0);
}

#[test]
fn noise_is_seeded() {
    let mut file = SceneFile::new(Scene::sphere());
    file.camera.noise_sigma0 = 0.0012;
    let a = render_depth(&file.scene, &file.poses()[0], &file.render_options(0));
    let b = render_depth(&file.scene, &file.poses()[0], &file.render_options(0));
    let c = render_depth(&file.scene, &file.poses()[0], &file.render_options(1));
    assert_eq!(a.depth, b.depth);
    assert_ne!(a.depth, c.depth);
}

#[test]
fn scene_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    let file = ScenePreset::Composite.scene_file();
    file.save(&path).unwrap();
    let back = SceneFile::load(&path).unwrap();
    assert_eq!(back.trajectory, file.trajectory);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..500 {
        let p = Point3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        assert!((back.scene.sdf(&p) - file.scene.sdf(&p)).abs() < 1e-12);
    }
}
