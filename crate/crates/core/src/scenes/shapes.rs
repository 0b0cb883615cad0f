use nalgebra::{Point3, Unit, UnitQuaternion, Vector3};

use crate::error::{Error, Result};

/// Analytic primitive. Distances are negative inside.
#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    Sphere {
        center: Point3<f64>,
        radius: f64,
    },
    /// Oriented box; `rotation` maps box-local axes to world axes.
    Cuboid {
        center: Point3<f64>,
        half_extents: Vector3<f64>,
        rotation: UnitQuaternion<f64>,
    },
    /// Infinite slab of the given thickness centered on a plane.
    Slab {
        point: Point3<f64>,
        normal: Unit<Vector3<f64>>,
        thickness: f64,
    },
    /// Half space behind the plane (the normal points outside).
    Plane {
        point: Point3<f64>,
        normal: Unit<Vector3<f64>>,
    },
}

/// A primitive with its inside/outside orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct Shape {
    pub primitive: Primitive,
    /// Swaps inside and outside, e.g. for a room seen from within.
    pub inverted: bool,
}

impl Shape {
    pub fn new(primitive: Primitive) -> Shape {
        Shape { primitive, inverted: false }
    }

    pub fn sphere(center: Point3<f64>, radius: f64) -> Shape {
        Shape::new(Primitive::Sphere { center, radius })
    }

    pub fn cuboid(center: Point3<f64>, half_extents: Vector3<f64>, rotation: UnitQuaternion<f64>) -> Shape {
        Shape::new(Primitive::Cuboid { center, half_extents, rotation })
    }

    pub fn slab(point: Point3<f64>, normal: Vector3<f64>, thickness: f64) -> Shape {
        Shape::new(Primitive::Slab { point, normal: Unit::new_normalize(normal), thickness })
    }

    /// A slab limited to a square of side `2 * half_extent` around `point`: a thin plate.
    pub fn plate(point: Point3<f64>, normal: Vector3<f64>, thickness: f64, half_extent: f64) -> Shape {
        let rotation = UnitQuaternion::rotation_between(&Vector3::x(), &normal)
            .unwrap_or_else(|| UnitQuaternion::from_axis_angle(&Vector3::z_axis(), std::f64::consts::PI));
        Shape::cuboid(
            point,
            Vector3::new(0.5 * thickness, half_extent, half_extent),
            rotation,
        )
    }

    pub fn plane(point: Point3<f64>, normal: Vector3<f64>) -> Shape {
        Shape::new(Primitive::Plane { point, normal: Unit::new_normalize(normal) })
    }

    pub fn inverted(mut self) -> Shape {
        self.inverted = !self.inverted;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match &self.primitive {
            Primitive::Sphere { radius, .. } => *radius > 0.0 && radius.is_finite(),
            Primitive::Cuboid { half_extents, .. } => half_extents.iter().all(|h| *h > 0.0 && h.is_finite()),
            Primitive::Slab { thickness, .. } => *thickness > 0.0 && thickness.is_finite(),
            Primitive::Plane { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("primitive needs positive extents: {:?}", self.primitive)))
        }
    }

    /// Exact signed distance.
    pub fn sdf(&self, p: &Point3<f64>) -> f64 {
        let d = match &self.primitive {
            Primitive::Sphere { center, radius } => (p - center).norm() - radius,
            Primitive::Cuboid { center, half_extents, rotation } => {
                let local = rotation.inverse_transform_vector(&(p - center));
                let q = local.abs() - half_extents;
                q.sup(&Vector3::zeros()).norm() + q.max().min(0.0)
            }
            Primitive::Slab { point, normal, thickness } => {
                (p - point).dot(normal).abs() - 0.5 * thickness
            }
            Primitive::Plane { point, normal } => (p - point).dot(normal),
        };
        if self.inverted {
            -d
        } else {
            d
        }
    }

    /// Ray parameters of every crossing of the primitive surface, unsorted.
    pub fn intersections(&self, o: &Point3<f64>, d: &Vector3<f64>) -> Vec<f64> {
        match &self.primitive {
            Primitive::Sphere { center, radius } => {
                let oc = o - center;
                let b = oc.dot(d);
                let c = oc.norm_squared() - radius * radius;
                let disc = b * b - c;
                if disc < 0.0 {
                    return Vec::new();
                }
                let s = disc.sqrt();
                vec![-b - s, -b + s]
            }
            Primitive::Cuboid { center, half_extents, rotation } => {
                let lo = rotation.inverse_transform_vector(&(o - center));
                let ld = rotation.inverse_transform_vector(d);
                let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
                for a in 0..3 {
                    if ld[a] == 0.0 {
                        if lo[a].abs() > half_extents[a] {
                            return Vec::new();
                        }
                        continue;
                    }
                    let ta = (-half_extents[a] - lo[a]) / ld[a];
                    let tb = (half_extents[a] - lo[a]) / ld[a];
                    t0 = t0.max(ta.min(tb));
                    t1 = t1.min(ta.max(tb));
                }
                if t0 > t1 {
                    Vec::new()
                } else {
                    vec![t0, t1]
                }
            }
            Primitive::Slab { point, normal, thickness } => {
                let dn = d.dot(normal);
                if dn == 0.0 {
                    return Vec::new();
                }
                let s = (o - point).dot(normal);
                let h = 0.5 * thickness;
                vec![(h - s) / dn, (-h - s) / dn]
            }
            Primitive::Plane { point, normal } => {
                let dn = d.dot(normal);
                if dn == 0.0 {
                    return Vec::new();
                }
                vec![-(o - point).dot(normal) / dn]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_distances() {
        let s = Shape::sphere(Point3::origin(), 0.5);
        assert_eq!(s.sdf(&Point3::new(1.0, 0.0, 0.0)), 0.5);
        assert_eq!(s.sdf(&Point3::origin()), -0.5);
        assert_eq!(s.clone().inverted().sdf(&Point3::origin()), 0.5);
    }

    #[test]
    fn slab_mid_plane() {
        let s = Shape::slab(Point3::origin(), Vector3::z(), 0.005);
        assert_relative_eq!(s.sdf(&Point3::new(3.0, -1.0, 0.0)), -0.0025);
        let p = Shape::plate(Point3::origin(), Vector3::z(), 0.005, 0.3);
        assert_relative_eq!(p.sdf(&Point3::new(0.1, -0.1, 0.0)), -0.0025, epsilon = 1e-12);
        assert_relative_eq!(p.sdf(&Point3::new(0.0, 0.0, 0.1)), 0.0975, epsilon = 1e-12);
        assert_relative_eq!(p.sdf(&Point3::new(0.4, 0.0, 0.0)), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn rotated_box() {
        let r = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), std::f64::consts::FRAC_PI_4);
        let b = Shape::cuboid(Point3::origin(), Vector3::repeat(1.0), r);
        assert_relative_eq!(b.sdf(&Point3::new(2.0f64.sqrt() + 1.0, 0.0, 0.0)), 1.0, epsilon = 1e-12);
        let hits = b.intersections(&Point3::new(-5.0, 0.0, 0.0), &Vector3::x());
        assert_relative_eq!(hits[0], 5.0 - 2.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn crossings_lie_on_the_surface() {
        let shapes = [
            Shape::sphere(Point3::new(0.1, 0.2, 0.3), 0.4),
            Shape::slab(Point3::origin(), Vector3::new(1.0, 2.0, 3.0), 0.01),
            Shape::plane(Point3::new(0.0, 0.0, 1.0), Vector3::new(0.0, 1.0, 1.0)),
            Shape::plate(Point3::origin(), Vector3::new(1.0, 1.0, 0.0), 0.01, 0.5),
        ];
        let o = Point3::new(-2.0, -1.5, -1.0);
        let d = Vector3::new(1.0, 0.8, 0.7).normalize();
        for s in &shapes {
            let hits = s.intersections(&o, &d);
            assert!(!hits.is_empty());
            for t in hits {
                assert!(s.sdf(&(o + d * t)).abs() < 1e-9, "{s:?}");
            }
        }
    }
}
