//! Cube topology shared by the marching-cubes variants.

use nalgebra::Vector3;

/// Corner offsets in lattice units.
pub(crate) const CORNERS: [[i32; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [1, 1, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [1, 1, 1],
    [0, 1, 1],
];

/// Corner pairs of the twelve cube edges.
pub(crate) const EDGES: [[usize; 2]; 12] = [
    [0, 1],
    [1, 2],
    [2, 3],
    [3, 0],
    [4, 5],
    [5, 6],
    [6, 7],
    [7, 4],
    [0, 4],
    [1, 5],
    [2, 6],
    [3, 7],
];

/// The corner reached from corner 0 along each axis; edges `0 - OWNED[a]` are the owned edges.
pub(crate) const OWNED: [usize; 3] = [1, 3, 4];

/// Axis of an edge and its endpoints ordered `(lower, upper)` along that axis.
pub(crate) const fn edge_geometry(e: usize) -> (usize, usize, usize) {
    let [a, b] = EDGES[e];
    let mut axis = 0;
    while axis < 3 && CORNERS[a][axis] == CORNERS[b][axis] {
        axis += 1;
    }
    if CORNERS[a][axis] < CORNERS[b][axis] {
        (axis, a, b)
    } else {
        (axis, b, a)
    }
}

#[inline]
pub(crate) fn is_trivial(mask: u8) -> bool {
    mask == 0 || mask == 255
}

/// Connected components of the corners set in `mask` under cube-edge adjacency, ordered by
/// their lowest corner.
pub fn components(mask: u8) -> Vec<u8> {
    let mut out = Vec::new();
    let mut remaining = mask;
    while remaining != 0 {
        let seed = remaining.trailing_zeros() as usize;
        let mut comp = 1u8 << seed;
        loop {
            let mut grown = comp;
            for [a, b] in EDGES {
                if comp & (1 << a) != 0 && mask & (1 << b) != 0 {
                    grown |= 1 << b;
                }
                if comp & (1 << b) != 0 && mask & (1 << a) != 0 {
                    grown |= 1 << a;
                }
            }
            if grown == comp {
                break;
            }
            comp = grown;
        }
        out.push(comp);
        remaining &= !comp;
    }
    out
}

/// Trilinear gradient at the cell center of corner values, in units of value per cell.
pub(crate) fn center_gradient(values: &[f64; 8]) -> Vector3<f64> {
    let mut g = Vector3::zeros();
    for (c, off) in CORNERS.iter().enumerate() {
        for a in 0..3 {
            g[a] += if off[a] == 1 { values[c] } else { -values[c] } * 0.25;
        }
    }
    g
}

/// Orientation of the surface of an index: the center gradient of `-1` inside / `+1` outside.
pub(crate) fn sign_gradient(mask: u8) -> Vector3<f64> {
    let mut values = [1.0; 8];
    for (c, v) in values.iter_mut().enumerate() {
        if mask & (1 << c) != 0 {
            *v = -1.0;
        }
    }
    center_gradient(&values)
}

/// Gradient of the surface around one component, averaged over the edges leaving it.
pub(crate) fn component_gradient(component: u8, values: &[f64; 8]) -> Vector3<f64> {
    let mut g = Vector3::zeros();
    for [a, b] in EDGES {
        let (inside, outside) = match (component & (1 << a) != 0, component & (1 << b) != 0) {
            (true, false) => (a, b),
            (false, true) => (b, a),
            _ => continue,
        };
        let mut dir = Vector3::zeros();
        for k in 0..3 {
            dir[k] = (CORNERS[outside][k] - CORNERS[inside][k]) as f64;
        }
        g += dir * (values[outside] - values[inside]);
    }
    g
}
