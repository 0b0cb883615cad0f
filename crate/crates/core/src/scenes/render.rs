use nalgebra::Isometry3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::Scene;
use crate::fusion::{DepthFrame, Intrinsics};
use crate::par;

/// Camera model and sensor noise of the renderer.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderOptions {
    pub width: usize,
    pub height: usize,
    pub intrinsics: Intrinsics,
    /// Depth noise standard deviation is `noise_sigma0 * z^2`; 0 renders exact depth.
    pub noise_sigma0: f64,
    pub seed: u64,
}

impl Default for RenderOptions {
    /// The Kinect model at half resolution, noiseless.
    fn default() -> Self {
        RenderOptions {
            width: 320,
            height: 240,
            intrinsics: Intrinsics::kinect().scaled(0.5),
            noise_sigma0: 0.0,
            seed: 0,
        }
    }
}

/// Ray-traces the z-depth of the first surface behind every pixel center. Pixels that miss
/// all geometry are 0.
pub fn render_depth(scene: &Scene, pose: &Isometry3<f64>, opts: &RenderOptions) -> DepthFrame {
    let frame = DepthFrame {
        width: opts.width,
        height: opts.height,
        depth: Vec::new(),
        intrinsics: opts.intrinsics,
        pose: *pose,
    };
    let origin = frame.camera_center();
    let noise = (opts.noise_sigma0 > 0.0).then_some(opts.noise_sigma0);
    let rows = par::map_range(opts.height, |v| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        (0..opts.width)
            .map(|u| {
                let ray_cam = frame.ray_camera(u as f64, v as f64);
                let dir = pose.rotation * ray_cam;
                let Some(t) = scene.raycast(&origin, &dir, 0.0) else { return 0.0 };
                let mut z = t * ray_cam.z;
                if let Some(s0) = noise {
                    if let Ok(n) = Normal::new(0.0, s0 * z * z) {
                        z += n.sample(&mut rng);
                    }
                }
                z as f32
            })
            .collect::<Vec<f32>>()
    });
    DepthFrame { depth: rows.concat(), ..frame }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenes::{look_at, Shape};
    use nalgebra::{Point3, Vector3};

    fn centered() -> RenderOptions {
        RenderOptions { width: 33, height: 25, intrinsics: Intrinsics::new(30.0, 16.0, 12.0), ..Default::default() }
    }

    #[test]
    fn sphere_center_pixel() {
        let scene = Scene::new(vec![Shape::sphere(Point3::new(0.0, 0.0, 2.0), 0.5)]);
        let frame = render_depth(&scene, &Isometry3::identity(), &centered());
        assert!((frame.raw(16, 12) as f64 - 1.5).abs() < 1e-6);
        assert_eq!(frame.raw(0, 0), 0.0);
    }

    #[test]
    fn fronto_parallel_plane() {
        let scene = Scene::new(vec![Shape::plane(Point3::new(0.0, 0.0, 1.5), -Vector3::z())]);
        let frame = render_depth(&scene, &Isometry3::identity(), &centered());
        assert_eq!(frame.raw(16, 12), 1.5);
        assert!(frame.depth.iter().all(|&z| (z - 1.5).abs() < 1e-6));
    }

    #[test]
    fn pixels_back_project_onto_the_surface() {
        let scene = Scene::composite();
        let pose = look_at(&Point3::new(1.2, -1.5, 0.5), &Point3::new(0.0, -0.3, 0.0));
        let frame = render_depth(&scene, &pose, &RenderOptions::default());
        let mut valid = 0;
        for v in 0..frame.height {
            for u in 0..frame.width {
                let z = frame.raw(u, v) as f64;
                if z > 0.0 {
                    valid += 1;
                    let p = pose * frame.backproject(u as f64, v as f64, z);
                    // f32 storage limits the agreement.
                    assert!(scene.sdf(&p).abs() < 1e-6, "{}", scene.sdf(&p));
                }
            }
        }
        assert!(valid > 1000);
    }

    #[test]
    fn noise_is_seeded() {
        let scene = Scene::sphere();
        let pose = look_at(&Point3::new(2.0, 0.0, 0.0), &Point3::origin());
        let opts = RenderOptions { noise_sigma0: 0.002, seed: 7, ..Default::default() };
        let a = render_depth(&scene, &pose, &opts);
        let b = render_depth(&scene, &pose, &opts);
        let clean = render_depth(&scene, &pose, &RenderOptions::default());
        assert_eq!(a.depth, b.depth);
        assert_ne!(a.depth, clean.depth);
    }
}
