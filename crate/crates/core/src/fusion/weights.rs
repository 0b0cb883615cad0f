use nalgebra::{Point3, Vector3};

use crate::volume::{direction_weight, Direction};

/// Depth at which the depth weight saturates at 1, in meters.
pub const REFERENCE_DEPTH: f64 = 1.0;

/// Signed distance of `x` to the tangent plane through `p` with normal `n`, as `(p - x) · n`.
#[inline]
pub fn point_to_plane(p: &Point3<f64>, n: &Vector3<f64>, x: &Point3<f64>) -> f64 {
    (p - x).dot(n)
}

/// Inverse-square noise model `min(1, (d_ref / z)^2)`.
#[inline]
pub fn depth_weight(depth: f64) -> f64 {
    if depth <= 0.0 {
        return 0.0;
    }
    let r = REFERENCE_DEPTH / depth;
    (r * r).min(1.0)
}

/// Cosine between the normal and the direction back towards the camera, floored at zero.
#[inline]
pub fn angle_weight(normal: &Vector3<f64>, view_dir: &Vector3<f64>) -> f64 {
    (-normal.dot(view_dir)).max(0.0)
}

/// Combined measurement weight `w_depth * w_angle * w_D`, clamped to `[0, max_weight]`.
///
/// `direction` is `None` for the undirected TSDF, where `w_D = 1`.
pub fn fusion_weight(
    depth: f64,
    normal: &Vector3<f64>,
    view_dir: &Vector3<f64>,
    direction: Option<Direction>,
    max_weight: f64,
) -> f64 {
    let w_dir = direction.map_or(1.0, |d| direction_weight(normal, d));
    (depth_weight(depth) * angle_weight(normal, view_dir) * w_dir).clamp(0.0, max_weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn point_to_plane_values() {
        let p = Point3::new(0.0, 0.0, 1.0);
        let n = Vector3::z();
        assert_eq!(point_to_plane(&p, &n, &Point3::origin()), 1.0);
        assert_eq!(point_to_plane(&p, &n, &p), 0.0);
        assert_eq!(point_to_plane(&p, &n, &Point3::new(0.5, 7.0, 1.0)), 0.0);
    }

    #[test]
    fn combined_weight_values() {
        let view = Vector3::z();
        let n = -Vector3::z();
        assert_eq!(fusion_weight(1.0, &n, &view, None, 1.0), 1.0);
        assert_relative_eq!(fusion_weight(2.0, &n, &view, None, 1.0), 0.25);
        assert_eq!(fusion_weight(1.0, &Vector3::x(), &view, None, 1.0), 0.0);
        assert_eq!(fusion_weight(0.5, &n, &view, Some(Direction::ZNeg), 1.0), 1.0);
        assert_eq!(fusion_weight(1.0, &n, &view, Some(Direction::ZPos), 1.0), 0.0);
    }

    #[test]
    fn depth_weight_is_monotone() {
        let mut last = f64::INFINITY;
        for i in 1..100 {
            let w = depth_weight(i as f64 * 0.1);
            assert!(w <= last && (0.0..=1.0).contains(&w));
            last = w;
        }
    }
}
