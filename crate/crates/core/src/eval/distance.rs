//! Directed mesh-to-reference distances.

use nalgebra::Point3;

use super::bvh::MeshIndex;
use crate::error::{Error, Result};
use crate::meshing::TriangleMesh;
use crate::par;
use crate::scenes::Scene;

/// Ground truth a reconstruction is measured against.
#[derive(Clone, Debug)]
pub enum Reference {
    /// Exact unsigned distance from the scene's signed distance function.
    Analytic(Scene),
    /// Closest-point distance to a triangle mesh.
    Mesh(MeshIndex),
}

impl Reference {
    pub fn mesh(mesh: &TriangleMesh) -> Result<Reference> {
        if mesh.triangle_count() == 0 {
            return Err(Error::Input("reference mesh has no triangles".into()));
        }
        Ok(Reference::Mesh(MeshIndex::new(mesh)))
    }

    pub fn distance(&self, p: &Point3<f64>) -> f64 {
        match self {
            Reference::Analytic(scene) => scene.sdf(p).abs(),
            Reference::Mesh(index) => index.closest_point(p).map_or(f64::INFINITY, |(_, d)| d),
        }
    }
}

/// Per-vertex distances to the reference and their summary statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceReport {
    pub rmse: f64,
    pub mean: f64,
    pub max: f64,
    pub distances: Vec<f64>,
}

impl DistanceReport {
    pub fn from_distances(distances: Vec<f64>) -> Result<DistanceReport> {
        if distances.is_empty() {
            return Err(Error::Input("no distance samples".into()));
        }
        let n = distances.len() as f64;
        let mean = distances.iter().sum::<f64>() / n;
        let rmse = (distances.iter().map(|d| d * d).sum::<f64>() / n).sqrt();
        let max = distances.iter().copied().fold(0.0, f64::max);
        Ok(DistanceReport { rmse, mean, max, distances })
    }

    pub fn samples(&self) -> usize {
        self.distances.len()
    }
}

/// Unsigned distance from every mesh vertex to the reference surface.
pub fn mesh_to_reference_distances(mesh: &TriangleMesh, reference: &Reference) -> Result<DistanceReport> {
    if mesh.vertex_count() == 0 {
        return Err(Error::Input("mesh has no vertices".into()));
    }
    let distances = par::map_slice(&mesh.vertices, |p| reference.distance(p));
    DistanceReport::from_distances(distances)
}

/// Distances mapped to `[0, 1]` for a heatmap, saturating at `clamp_max`.
pub fn heatmap_scalars(report: &DistanceReport, clamp_max: f64) -> Result<Vec<f64>> {
    if !(clamp_max > 0.0) || !clamp_max.is_finite() {
        return Err(Error::Config(format!("heatmap clamp must be positive, got {clamp_max}")));
    }
    Ok(report.distances.iter().map(|d| (d / clamp_max).clamp(0.0, 1.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_offset() {
        let r = DistanceReport::from_distances(vec![0.002; 10]).unwrap();
        assert!((r.rmse - 0.002).abs() < 1e-15);
        assert!((r.mean - 0.002).abs() < 1e-15);
        assert_eq!(r.max, 0.002);
    }

    #[test]
    fn heatmap_clamps() {
        let r = DistanceReport::from_distances(vec![0.0, 0.5, 1.0, 3.0]).unwrap();
        assert_eq!(heatmap_scalars(&r, 1.0).unwrap(), vec![0.0, 0.5, 1.0, 1.0]);
        assert!(heatmap_scalars(&r, 0.0).is_err());
    }

    #[test]
    fn empty_mesh_rejected() {
        let mesh = TriangleMesh::new(vec![], vec![]);
        assert!(mesh_to_reference_distances(&mesh, &Reference::Analytic(Scene::sphere())).is_err());
    }
}
