//! Bounding-volume hierarchy for closest-point queries against a triangle mesh.

use nalgebra::{Point3, Vector3};

use crate::meshing::TriangleMesh;

const LEAF_SIZE: usize = 4;

#[derive(Clone, Copy, Debug)]
struct Aabb {
    lo: Point3<f64>,
    hi: Point3<f64>,
}

impl Aabb {
    fn empty() -> Aabb {
        Aabb { lo: Point3::from(Vector3::repeat(f64::INFINITY)), hi: Point3::from(Vector3::repeat(f64::NEG_INFINITY)) }
    }

    fn grow(&mut self, p: &Point3<f64>) {
        self.lo = self.lo.inf(p);
        self.hi = self.hi.sup(p);
    }

    fn merge(&mut self, other: &Aabb) {
        self.grow(&other.lo);
        self.grow(&other.hi);
    }

    fn distance_squared(&self, p: &Point3<f64>) -> f64 {
        let d = (self.lo - p).sup(&Vector3::zeros()).sup(&(p - self.hi));
        d.norm_squared()
    }
}

#[derive(Clone, Debug)]
enum Node {
    Leaf { bounds: Aabb, start: usize, end: usize },
    Inner { bounds: Aabb, left: usize, right: usize },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

/// Closest point on triangle `abc` to `p`.
pub fn closest_point_on_triangle(p: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> Point3<f64> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Immutable closest-point index over the triangles of a mesh.
#[derive(Clone, Debug)]
pub struct MeshIndex {
    triangles: Vec<[Point3<f64>; 3]>,
    nodes: Vec<Node>,
}

impl MeshIndex {
    pub fn new(mesh: &TriangleMesh) -> MeshIndex {
        let mut triangles: Vec<[Point3<f64>; 3]> = (0..mesh.triangle_count()).map(|i| mesh.triangle(i)).collect();
        let mut nodes = Vec::new();
        if !triangles.is_empty() {
            let n = triangles.len();
            build(&mut triangles, 0, n, &mut nodes);
        }
        MeshIndex { triangles, nodes }
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Closest surface point and its distance, `None` for an empty mesh.
    pub fn closest_point(&self, p: &Point3<f64>) -> Option<(Point3<f64>, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (Point3::origin(), f64::INFINITY);
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i];
            if node.bounds().distance_squared(p) >= best.1 {
                continue;
            }
            match node {
                Node::Leaf { start, end, .. } => {
                    for [a, b, c] in &self.triangles[*start..*end] {
                        let q = closest_point_on_triangle(p, a, b, c);
                        let d = (q - p).norm_squared();
                        if d < best.1 {
                            best = (q, d);
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    let dl = self.nodes[*left].bounds().distance_squared(p);
                    let dr = self.nodes[*right].bounds().distance_squared(p);
                    // Visit the nearer child first.
                    if dl < dr {
                        stack.push(*right);
                        stack.push(*left);
                    } else {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        Some((best.0, best.1.sqrt()))
    }
}

fn build(tris: &mut [[Point3<f64>; 3]], start: usize, end: usize, nodes: &mut Vec<Node>) -> usize {
    let mut bounds = Aabb::empty();
    let mut centroids = Aabb::empty();
    for t in &tris[start..end] {
        for p in t {
            bounds.grow(p);
        }
        centroids.grow(&centroid(t));
    }
    let index = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { bounds, start, end });
        return index;
    }
    nodes.push(Node::Leaf { bounds, start, end });
    let extent = centroids.hi - centroids.lo;
    let axis = extent.imax();
    let mid = (start + end) / 2;
    tris[start..end].select_nth_unstable_by(mid - start, |a, b| centroid(a)[axis].total_cmp(&centroid(b)[axis]));
    let left = build(tris, start, mid, nodes);
    let right = build(tris, mid, end, nodes);
    let mut merged = *nodes[left].bounds();
    merged.merge(nodes[right].bounds());
    nodes[index] = Node::Inner { bounds: merged, left, right };
    index
}

fn centroid(t: &[Point3<f64>; 3]) -> Point3<f64> {
    Point3::from((t[0].coords + t[1].coords + t[2].coords) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_regions() {
        let (a, b, c) = (Point3::origin(), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0));
        let q = |x: f64, y: f64, z: f64| closest_point_on_triangle(&Point3::new(x, y, z), &a, &b, &c);
        let near = |p: Point3<f64>, x: f64, y: f64| assert!((p - Point3::new(x, y, 0.0)).norm() < 1e-12, "{p}");
        near(q(0.2, 0.2, 1.0), 0.2, 0.2);
        near(q(-1.0, -1.0, 0.0), 0.0, 0.0);
        near(q(2.0, -0.5, 0.0), 1.0, 0.0);
        near(q(0.5, -1.0, 0.0), 0.5, 0.0);
        near(q(1.0, 1.0, 0.0), 0.5, 0.5);
        near(q(-1.0, 0.5, 0.0), 0.0, 0.5);
    }
}
