//! Two-sided thickness of a reconstructed plate.

use nalgebra::{Point3, Unit, Vector3};

use crate::error::{Error, Result};
use crate::meshing::TriangleMesh;

/// Area-weighted offsets of the two sheets of a plate reconstruction.
///
/// Triangles are assigned to a sheet by the sign of their face normal along the plate normal.
/// Offsets are measured from the plate mid-plane.
#[derive(Clone, Debug, PartialEq)]
pub struct SheetReport {
    /// Area of triangles facing along `+normal`.
    pub front_area: f64,
    pub back_area: f64,
    pub front_offset: f64,
    pub back_offset: f64,
    /// `front_offset - back_offset`, `None` when a sheet is missing.
    pub thickness: Option<f64>,
}

impl SheetReport {
    /// Absolute thickness error, infinite when either sheet is missing.
    pub fn thickness_error(&self, truth: f64) -> f64 {
        self.thickness.map_or(f64::INFINITY, |t| (t - truth).abs())
    }
}

/// Measures the sheets of a plate with the given mid-plane.
///
/// Only triangles whose centroid lies within `lateral` of `center` in the plane and within
/// `band` of the mid-plane contribute.
pub fn sheet_thickness(
    mesh: &TriangleMesh,
    center: &Point3<f64>,
    normal: &Unit<Vector3<f64>>,
    lateral: f64,
    band: f64,
) -> Result<SheetReport> {
    if !(lateral > 0.0 && band > 0.0) {
        return Err(Error::Config("sheet window must be positive".into()));
    }
    let (mut fa, mut fo, mut ba, mut bo) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..mesh.triangle_count() {
        let [a, b, c] = mesh.triangle(i);
        let cross = (b - a).cross(&(c - a));
        let area = 0.5 * cross.norm();
        if area == 0.0 {
            continue;
        }
        let centroid = Point3::from((a.coords + b.coords + c.coords) / 3.0);
        let rel = centroid - center;
        let offset = rel.dot(normal);
        let in_plane = (rel - normal.into_inner() * offset).norm();
        if in_plane > lateral || offset.abs() > band {
            continue;
        }
        let facing = cross.dot(normal);
        if facing > 0.0 {
            fa += area;
            fo += area * offset;
        } else if facing < 0.0 {
            ba += area;
            bo += area * offset;
        }
    }
    let front_offset = if fa > 0.0 { fo / fa } else { f64::NAN };
    let back_offset = if ba > 0.0 { bo / ba } else { f64::NAN };
    let thickness = (fa > 0.0 && ba > 0.0).then_some(front_offset - back_offset);
    Ok(SheetReport { front_area: fa, back_area: ba, front_offset, back_offset, thickness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(z: f64, up: bool) -> TriangleMesh {
        let v = vec![
            Point3::new(-1.0, -1.0, z),
            Point3::new(1.0, -1.0, z),
            Point3::new(1.0, 1.0, z),
            Point3::new(-1.0, 1.0, z),
        ];
        let t = if up { vec![[0, 1, 2], [0, 2, 3]] } else { vec![[0, 2, 1], [0, 3, 2]] };
        TriangleMesh::new(v, t)
    }

    #[test]
    fn two_sheets() {
        let mut m = quad(0.003, true);
        m.append(&quad(-0.002, false));
        let r = sheet_thickness(&m, &Point3::origin(), &Vector3::z_axis(), 2.0, 0.1).unwrap();
        assert!((r.thickness.unwrap() - 0.005).abs() < 1e-12);
        assert!((r.thickness_error(0.004) - 0.001).abs() < 1e-12);
    }

    #[test]
    fn missing_sheet() {
        let r = sheet_thickness(&quad(0.0, true), &Point3::origin(), &Vector3::z_axis(), 2.0, 0.1).unwrap();
        assert_eq!(r.thickness, None);
        assert!(r.thickness_error(0.005).is_infinite());
    }
}
