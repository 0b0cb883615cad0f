use nalgebra::{Isometry3, Point3, Vector3};

use crate::error::{Error, Result};

/// Pinhole intrinsics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Intrinsics {
    pub fn new(f: f64, cx: f64, cy: f64) -> Intrinsics {
        Intrinsics { fx: f, fy: f, cx, cy }
    }

    /// The standard Kinect model for 640x480 images.
    pub fn kinect() -> Intrinsics {
        Intrinsics::new(525.0, 319.5, 239.5)
    }

    /// Intrinsics for an image resampled by `scale` (pixel centers stay aligned).
    pub fn scaled(&self, scale: f64) -> Intrinsics {
        Intrinsics {
            fx: self.fx * scale,
            fy: self.fy * scale,
            cx: (self.cx + 0.5) * scale - 0.5,
            cy: (self.cy + 0.5) * scale - 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.fx, self.fy, self.cx, self.cy].iter().all(|v| v.is_finite())
            && self.fx > 0.0
            && self.fy > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Input(format!("invalid intrinsics {self:?}")))
        }
    }
}

/// Valid depth interval (exclusive bounds).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepthRange {
    pub min: f64,
    pub max: f64,
}

impl Default for DepthRange {
    fn default() -> Self {
        DepthRange { min: 0.1, max: 10.0 }
    }
}

impl DepthRange {
    #[inline]
    pub fn contains(&self, z: f64) -> bool {
        z.is_finite() && z > self.min && z < self.max
    }
}

/// Row-major depth image in meters with its camera. `0` and `NaN` mark missing depth.
#[derive(Clone, Debug)]
pub struct DepthFrame {
    pub width: usize,
    pub height: usize,
    pub depth: Vec<f32>,
    pub intrinsics: Intrinsics,
    /// Camera-to-world transform.
    pub pose: Isometry3<f64>,
}

impl DepthFrame {
    pub fn new(
        width: usize,
        height: usize,
        depth: Vec<f32>,
        intrinsics: Intrinsics,
        pose: Isometry3<f64>,
    ) -> Result<DepthFrame> {
        let frame = DepthFrame { width, height, depth, intrinsics, pose };
        frame.validate()?;
        Ok(frame)
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth.len() != self.width * self.height {
            return Err(Error::Input(format!(
                "depth buffer has {} samples, expected {}x{}",
                self.depth.len(),
                self.width,
                self.height
            )));
        }
        self.intrinsics.validate()?;
        let r = self.pose.rotation.to_rotation_matrix();
        let m = r.matrix();
        let ortho = (m.transpose() * m - nalgebra::Matrix3::identity()).abs().max();
        let t = self.pose.translation.vector;
        if !(ortho <= 1e-6 && t.iter().all(|v| v.is_finite())) {
            return Err(Error::Input("camera pose is not a rigid transform".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn raw(&self, u: usize, v: usize) -> f32 {
        self.depth[v * self.width + u]
    }

    /// Depth at a pixel if it is a valid measurement.
    #[inline]
    pub fn depth(&self, u: usize, v: usize, range: &DepthRange) -> Option<f64> {
        let z = self.raw(u, v) as f64;
        range.contains(z).then_some(z)
    }

    /// Camera-frame point at depth `z` behind pixel `(u, v)`.
    #[inline]
    pub fn backproject(&self, u: f64, v: f64, z: f64) -> Point3<f64> {
        let k = &self.intrinsics;
        Point3::new((u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z)
    }

    /// Unit camera-frame viewing ray through a pixel.
    pub fn ray_camera(&self, u: f64, v: f64) -> Vector3<f64> {
        self.backproject(u, v, 1.0).coords.normalize()
    }

    /// Continuous pixel coordinates of a camera-frame point in front of the camera.
    #[inline]
    pub fn project(&self, p: &Point3<f64>) -> Option<(f64, f64)> {
        if p.z <= 0.0 {
            return None;
        }
        let k = &self.intrinsics;
        Some((k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy))
    }

    pub fn camera_center(&self) -> Point3<f64> {
        Point3::from(self.pose.translation.vector)
    }

    pub fn valid_pixel_count(&self, range: &DepthRange) -> usize {
        self.depth.iter().filter(|z| range.contains(**z as f64)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn project_inverts_backproject() {
        let f = DepthFrame::new(4, 3, vec![1.0; 12], Intrinsics::new(2.0, 1.5, 1.0), Isometry3::identity())
            .unwrap();
        let p = f.backproject(3.0, 0.25, 2.5);
        let (u, v) = f.project(&p).unwrap();
        assert!((u - 3.0).abs() < 1e-12 && (v - 0.25).abs() < 1e-12);
    }

    #[test]
    fn scaled_kinect() {
        let k = Intrinsics::kinect().scaled(0.5);
        assert_eq!((k.fx, k.cx, k.cy), (262.5, 159.5, 119.5));
    }

    #[test]
    fn rejects_wrong_buffer() {
        assert!(DepthFrame::new(4, 3, vec![1.0; 11], Intrinsics::kinect(), Isometry3::identity())
            .is_err());
    }

    #[test]
    fn invalid_depths() {
        let mut depth = vec![1.0f32; 4];
        depth[1] = 0.0;
        depth[2] = f32::NAN;
        depth[3] = 50.0;
        let f = DepthFrame::new(4, 1, depth, Intrinsics::kinect(), Isometry3::identity()).unwrap();
        let r = DepthRange::default();
        assert_eq!(f.depth(0, 0, &r), Some(1.0));
        assert_eq!(f.depth(1, 0, &r), None);
        assert_eq!(f.depth(2, 0, &r), None);
        assert_eq!(f.depth(3, 0, &r), None);
    }
}
