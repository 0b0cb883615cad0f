//! TOML scene description.
//!
//! ```toml
//! [[shape]]
//! kind = "sphere"          # sphere | box | slab | plane
//! center = [0.0, 0.0, 0.0]
//! radius = 0.5
//!
//! [[shape]]
//! kind = "box"
//! center = [0.0, -0.6, 0.0]
//! half_extents = [0.15, 0.15, 0.15]
//! rotation = [0.0, 0.0, 0.5236]   # axis * angle in radians, optional
//! inverted = false                # optional, every kind
//!
//! [[shape]]
//! kind = "slab"
//! point = [0.0, 0.0, 0.0]
//! normal = [1.0, 0.0, 0.0]
//! thickness = 0.005
//! half_extent = 0.3               # optional; bounds the slab to a square plate
//!
//! [[shape]]
//! kind = "plane"
//! point = [0.0, 0.0, -0.5]
//! normal = [0.0, 0.0, 1.0]
//!
//! [trajectory]                    # all optional
//! center = [0.0, 0.0, 0.0]
//! radius = 2.0
//! frames = 60
//! height = 0.5
//!
//! [camera]                        # all optional
//! width = 320
//! height = 240
//! fx = 262.5                      # intrinsics default to the Kinect model scaled to `width`
//! fy = 262.5
//! cx = 159.5
//! cy = 119.5
//! noise_sigma0 = 0.0
//! seed = 0
//! ```

use std::path::Path;

use nalgebra::{Isometry3, Point3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::render::RenderOptions;
use super::shapes::{Primitive, Shape};
use super::trajectory::circular_trajectory;
use super::Scene;
use crate::error::{Error, Result};
use crate::fusion::Intrinsics;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawShape {
    Sphere {
        center: [f64; 3],
        radius: f64,
        #[serde(default)]
        inverted: bool,
    },
    Box {
        center: [f64; 3],
        half_extents: [f64; 3],
        #[serde(default)]
        rotation: [f64; 3],
        #[serde(default)]
        inverted: bool,
    },
    Slab {
        point: [f64; 3],
        normal: [f64; 3],
        thickness: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        half_extent: Option<f64>,
        #[serde(default)]
        inverted: bool,
    },
    Plane {
        point: [f64; 3],
        normal: [f64; 3],
        #[serde(default)]
        inverted: bool,
    },
}

impl RawShape {
    fn to_shape(&self) -> Result<Shape> {
        let nonzero = |n: &[f64; 3]| {
            let v = Vector3::from(*n);
            if v.norm() > 0.0 && v.iter().all(|x| x.is_finite()) {
                Ok(v)
            } else {
                Err(Error::Config(format!("normal {n:?} must be a nonzero vector")))
            }
        };
        let (shape, inverted) = match self {
            RawShape::Sphere { center, radius, inverted } => {
                (Shape::sphere(Point3::from(*center), *radius), *inverted)
            }
            RawShape::Box { center, half_extents, rotation, inverted } => (
                Shape::cuboid(
                    Point3::from(*center),
                    Vector3::from(*half_extents),
                    UnitQuaternion::from_scaled_axis(Vector3::from(*rotation)),
                ),
                *inverted,
            ),
            RawShape::Slab { point, normal, thickness, half_extent, inverted } => {
                let n = nonzero(normal)?;
                let shape = match half_extent {
                    Some(h) if *h > 0.0 => Shape::plate(Point3::from(*point), n, *thickness, *h),
                    Some(h) => return Err(Error::Config(format!("slab half_extent must be positive, got {h}"))),
                    None => Shape::slab(Point3::from(*point), n, *thickness),
                };
                (shape, *inverted)
            }
            RawShape::Plane { point, normal, inverted } => {
                (Shape::plane(Point3::from(*point), nonzero(normal)?), *inverted)
            }
        };
        let shape = Shape { inverted, ..shape };
        shape.validate()?;
        Ok(shape)
    }

    fn from_shape(shape: &Shape) -> RawShape {
        let inverted = shape.inverted;
        match &shape.primitive {
            Primitive::Sphere { center, radius } => {
                RawShape::Sphere { center: center.coords.into(), radius: *radius, inverted }
            }
            Primitive::Cuboid { center, half_extents, rotation } => RawShape::Box {
                center: center.coords.into(),
                half_extents: (*half_extents).into(),
                rotation: rotation.scaled_axis().into(),
                inverted,
            },
            Primitive::Slab { point, normal, thickness } => RawShape::Slab {
                point: point.coords.into(),
                normal: normal.into_inner().into(),
                thickness: *thickness,
                half_extent: None,
                inverted,
            },
            Primitive::Plane { point, normal } => RawShape::Plane {
                point: point.coords.into(),
                normal: normal.into_inner().into(),
                inverted,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectorySpec {
    pub center: [f64; 3],
    pub radius: f64,
    pub frames: usize,
    pub height: f64,
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        TrajectorySpec { center: [0.0; 3], radius: 2.0, frames: 60, height: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraSpec {
    pub width: usize,
    pub height: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cx: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cy: Option<f64>,
    pub noise_sigma0: f64,
    pub seed: u64,
}

impl Default for CameraSpec {
    fn default() -> Self {
        CameraSpec {
            width: 320,
            height: 240,
            fx: None,
            fy: None,
            cx: None,
            cy: None,
            noise_sigma0: 0.0,
            seed: 0,
        }
    }
}

impl CameraSpec {
    pub fn intrinsics(&self) -> Intrinsics {
        let base = Intrinsics::kinect().scaled(self.width as f64 / 640.0);
        Intrinsics {
            fx: self.fx.unwrap_or(base.fx),
            fy: self.fy.unwrap_or(base.fy),
            cx: self.cx.unwrap_or(base.cx),
            cy: self.cy.unwrap_or(base.cy),
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[serde(default, rename = "shape")]
    shapes: Vec<RawShape>,
    #[serde(default)]
    trajectory: TrajectorySpec,
    #[serde(default)]
    camera: CameraSpec,
}

/// A scene together with the orbit and camera used to render it.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneFile {
    pub scene: Scene,
    pub trajectory: TrajectorySpec,
    pub camera: CameraSpec,
}

impl SceneFile {
    pub fn new(scene: Scene) -> SceneFile {
        SceneFile { scene, trajectory: TrajectorySpec::default(), camera: CameraSpec::default() }
    }

    pub fn parse(text: &str, path: &Path) -> Result<SceneFile> {
        let raw: RawFile = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            Error::Parse { path: path.to_path_buf(), line, message: e.message().to_string() }
        })?;
        let shapes = raw.shapes.iter().map(RawShape::to_shape).collect::<Result<Vec<_>>>()?;
        let file = SceneFile { scene: Scene::new(shapes), trajectory: raw.trajectory, camera: raw.camera };
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<SceneFile> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::NotFound(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        SceneFile::parse(&text, path)
    }

    pub fn to_toml(&self) -> String {
        let raw = RawFile {
            shapes: self.scene.shapes.iter().map(RawShape::from_shape).collect(),
            trajectory: self.trajectory.clone(),
            camera: self.camera.clone(),
        };
        toml::to_string(&raw).expect("scene files always serialize")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml())?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.scene.validate()?;
        let t = &self.trajectory;
        if !(t.radius > 0.0 && t.radius.is_finite()) || t.frames == 0 {
            return Err(Error::Config("trajectory needs a positive radius and at least one frame".into()));
        }
        if self.camera.width == 0 || self.camera.height == 0 {
            return Err(Error::Config("camera resolution must be nonzero".into()));
        }
        if !(self.camera.noise_sigma0 >= 0.0) {
            return Err(Error::Config("noise_sigma0 must be non-negative".into()));
        }
        self.camera.intrinsics().validate()
    }

    pub fn poses(&self) -> Vec<Isometry3<f64>> {
        let t = &self.trajectory;
        circular_trajectory(&Point3::from(t.center), t.radius, t.frames, t.height)
    }

    /// Renderer settings for frame `index`; each frame draws independent noise.
    pub fn render_options(&self, index: usize) -> RenderOptions {
        RenderOptions {
            width: self.camera.width,
            height: self.camera.height,
            intrinsics: self.camera.intrinsics(),
            noise_sigma0: self.camera.noise_sigma0,
            seed: self.camera.seed.wrapping_add(index as u64),
        }
    }
}
