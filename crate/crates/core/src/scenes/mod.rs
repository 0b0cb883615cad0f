//! Synthetic depth data: analytic scenes, a pinhole depth renderer and the circular orbit.

mod file;
mod render;
mod shapes;
mod trajectory;

use std::fmt;
use std::str::FromStr;

use nalgebra::{Point3, UnitQuaternion, Vector3};

use crate::error::{Error, Result};

pub use file::{CameraSpec, SceneFile, TrajectorySpec};
pub use render::{render_depth, RenderOptions};
pub use shapes::{Primitive, Shape};
pub use trajectory::{circular_trajectory, look_at};

/// Union of primitives.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scene {
    pub shapes: Vec<Shape>,
}

/// Tolerance for deciding that a crossing lies on the union's boundary.
const SURFACE_EPS: f64 = 1e-9;

impl Scene {
    pub fn new(shapes: Vec<Shape>) -> Scene {
        Scene { shapes }
    }

    pub fn validate(&self) -> Result<()> {
        self.shapes.iter().try_for_each(Shape::validate)
    }

    /// Signed distance of the union; `+inf` for an empty scene.
    pub fn sdf(&self, p: &Point3<f64>) -> f64 {
        self.shapes.iter().map(|s| s.sdf(p)).fold(f64::INFINITY, f64::min)
    }

    /// First ray parameter `t > t_min` at which `o + t d` hits the boundary of the union.
    pub fn raycast(&self, o: &Point3<f64>, d: &Vector3<f64>, t_min: f64) -> Option<f64> {
        let mut hits: Vec<(f64, usize)> = self
            .shapes
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.intersections(o, d).into_iter().map(move |t| (t, i)))
            .filter(|(t, _)| *t > t_min && t.is_finite())
            .collect();
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        hits.into_iter()
            .find(|&(t, i)| {
                let p = o + d * t;
                self.shapes
                    .iter()
                    .enumerate()
                    .all(|(j, s)| j == i || s.sdf(&p) >= -SURFACE_EPS)
            })
            .map(|(t, _)| t)
    }

    /// Sphere of radius 0.5 m at the origin.
    pub fn sphere() -> Scene {
        Scene::new(vec![Shape::sphere(Point3::origin(), 0.5)])
    }

    /// A 5 mm thick, 0.6 m wide plate facing the x axis. Its center is placed so that both
    /// faces fall into one 10 mm voxel.
    pub fn slab() -> Scene {
        Scene::new(vec![Shape::plate(Point3::new(0.0031, 0.0, 0.0), Vector3::x(), 0.005, 0.3)])
    }

    /// The plate next to a 0.3 m cube turned 30 degrees about the vertical axis.
    pub fn composite() -> Scene {
        let mut scene = Scene::slab();
        scene.shapes.push(Shape::cuboid(
            Point3::new(0.0, -0.6, 0.0),
            Vector3::repeat(0.15),
            UnitQuaternion::from_axis_angle(&Vector3::z_axis(), 30f64.to_radians()),
        ));
        scene
    }
}

/// Built-in scenes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenePreset {
    Sphere,
    Slab,
    Composite,
}

impl ScenePreset {
    pub const ALL: [ScenePreset; 3] = [ScenePreset::Sphere, ScenePreset::Slab, ScenePreset::Composite];

    pub fn name(self) -> &'static str {
        match self {
            ScenePreset::Sphere => "sphere",
            ScenePreset::Slab => "slab",
            ScenePreset::Composite => "composite",
        }
    }

    pub fn scene(self) -> Scene {
        match self {
            ScenePreset::Sphere => Scene::sphere(),
            ScenePreset::Slab => Scene::slab(),
            ScenePreset::Composite => Scene::composite(),
        }
    }

    /// The preset with the desk-scale camera and orbit.
    pub fn scene_file(self) -> SceneFile {
        SceneFile::new(self.scene())
    }
}

impl fmt::Display for ScenePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenePreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scene `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_hits_the_nearest_visible_surface() {
        let scene = Scene::new(vec![
            Shape::sphere(Point3::new(0.0, 0.0, 2.0), 0.5),
            Shape::sphere(Point3::new(0.0, 0.0, 2.3), 0.5),
        ]);
        let t = scene.raycast(&Point3::origin(), &Vector3::z(), 0.0).unwrap();
        assert!((t - 1.5).abs() < 1e-12);
        // From inside the first sphere the inner crossing with the second one is hidden.
        let t = scene.raycast(&Point3::new(0.0, 0.0, 2.0), &Vector3::z(), 0.0).unwrap();
        assert!((t - 0.8).abs() < 1e-12);
        assert!(Scene::default().raycast(&Point3::origin(), &Vector3::z(), 0.0).is_none());
    }

    #[test]
    fn slab_faces_share_a_voxel() {
        let scene = Scene::slab();
        let front = scene.raycast(&Point3::new(1.0, 0.0, 0.0), &-Vector3::x(), 0.0).unwrap();
        let back = scene.raycast(&Point3::new(-1.0, 0.0, 0.0), &Vector3::x(), 0.0).unwrap();
        let (xf, xb) = (1.0 - front, -1.0 + back);
        assert!((xf - xb - 0.005).abs() < 1e-12);
        assert_eq!((xf / 0.01).floor(), (xb / 0.01).floor());
    }

    #[test]
    fn preset_names() {
        for p in ScenePreset::ALL {
            assert_eq!(p.name().parse::<ScenePreset>().unwrap(), p);
        }
        assert!("teapot".parse::<ScenePreset>().is_err());
    }
}
