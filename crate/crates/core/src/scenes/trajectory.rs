use std::f64::consts::TAU;

use nalgebra::{Isometry3, Matrix3, Point3, Rotation3, Translation3, UnitQuaternion, Vector3};

/// Camera-to-world pose at `eye` looking at `target` with world +z up.
///
/// Camera axes are x right, y down, z forward.
pub fn look_at(eye: &Point3<f64>, target: &Point3<f64>) -> Isometry3<f64> {
    let forward = (target - eye).normalize();
    let mut up = Vector3::z();
    if forward.cross(&up).norm() < 1e-9 {
        up = Vector3::y();
    }
    let right = forward.cross(&up).normalize();
    let down = forward.cross(&right);
    let m = Matrix3::from_columns(&[right, down, forward]);
    let rotation = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(m));
    Isometry3::from_parts(Translation3::from(eye.coords), rotation)
}

/// `n_frames` poses evenly spaced in azimuth on a horizontal circle of `radius` around
/// `center`, raised by `height`, all aimed at `center`.
pub fn circular_trajectory(center: &Point3<f64>, radius: f64, n_frames: usize, height: f64) -> Vec<Isometry3<f64>> {
    (0..n_frames)
        .map(|k| {
            let a = TAU * k as f64 / n_frames as f64;
            let eye = center + Vector3::new(radius * a.cos(), radius * a.sin(), height);
            look_at(&eye, center)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optical_axes_pass_through_the_center() {
        let c = Point3::new(0.1, -0.2, 0.3);
        let poses = circular_trajectory(&c, 2.0, 7, 0.5);
        for pose in &poses {
            let eye = Point3::from(pose.translation.vector);
            let axis = pose.rotation * Vector3::z();
            let to_center = c - eye;
            assert!(axis.cross(&to_center).norm() < 1e-9);
            assert!(axis.dot(&to_center) > 0.0);
            let r = pose.rotation.to_rotation_matrix();
            assert!((r.matrix().transpose() * r.matrix() - Matrix3::identity()).abs().max() < 1e-12);
            assert!((r.matrix().determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn azimuths_are_evenly_spaced() {
        let poses = circular_trajectory(&Point3::origin(), 2.0, 4, 0.0);
        let az: Vec<f64> = poses
            .iter()
            .map(|p| p.translation.vector.y.atan2(p.translation.vector.x).to_degrees().rem_euclid(360.0))
            .collect();
        for (a, e) in az.iter().zip([0.0, 90.0, 180.0, 270.0]) {
            assert!((a - e).abs() < 1e-9);
        }
        let poses = circular_trajectory(&Point3::origin(), 2.0, 13, 0.4);
        let angle = |i: usize, j: usize| poses[i].rotation.angle_to(&poses[j].rotation);
        for k in 1..12 {
            assert!((angle(k, k + 1) - angle(0, 1)).abs() < 1e-9);
        }
    }

    #[test]
    fn image_down_is_world_down() {
        let pose = look_at(&Point3::new(2.0, 0.0, 0.0), &Point3::origin());
        assert!((pose.rotation * Vector3::y() - -Vector3::z()).norm() < 1e-12);
    }
}
