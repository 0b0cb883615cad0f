use std::collections::HashMap;
use std::time::Instant;

use nalgebra::Point3;

use super::cell::{analyze_classic, analyze_directional, edge_offset, CellState, Neighborhood};
use super::cube::{edge_geometry, is_trivial, CORNERS};
use super::mesh::TriangleMesh;
use super::regularize::{regularize, SlotField};
use super::tables::TRI_TABLE;
use super::{MeshConfig, MeshStats};
use crate::error::{Error, Result};
use crate::par;
use crate::volume::{block_of, position_of, BlockCoord, BlockMap, Layout, VoxelCoord, BLOCK_SIDE, BLOCK_VOXELS};

/// Whether table triangles must be reversed to face along the outward SDF gradient.
const REVERSE_TABLE_WINDING: bool = true;

/// Identifies a vertex slot: owning cell, edge axis and surface side.
type VertexKey = (VoxelCoord, u8, u8);

type CellStates = HashMap<BlockCoord, Vec<CellState>>;

pub(crate) fn cell_of(block: BlockCoord, i: usize) -> VoxelCoord {
    let s = BLOCK_SIDE;
    let i = i as i32;
    [block[0] * s + i % s, block[1] * s + (i / s) % s, block[2] * s + i / (s * s)]
}

fn sorted_coords(map: &BlockMap) -> Vec<BlockCoord> {
    let mut coords: Vec<BlockCoord> = map.blocks().map(|b| b.coord()).collect();
    coords.sort_unstable();
    coords
}

/// Runs `analyze` on every cell of every block, keeping the blocks that contain surface.
fn analyze_blocks<F>(map: &BlockMap, analyze: F) -> (CellStates, usize)
where
    F: Fn(&Neighborhood, VoxelCoord) -> (CellState, usize) + Sync + Send,
{
    let coords = sorted_coords(map);
    let results = par::map_slice(&coords, |&b| {
        let nb = Neighborhood::new(map, b);
        let mut dropped = 0;
        let mut any = false;
        let cells: Vec<CellState> = (0..BLOCK_VOXELS)
            .map(|i| {
                let (state, d) = analyze(&nb, cell_of(b, i));
                dropped += d;
                any |= state.has_surface();
                state
            })
            .collect();
        (b, any.then_some(cells), dropped)
    });
    let mut states = CellStates::new();
    let mut dropped = 0;
    for (b, cells, d) in results {
        dropped += d;
        if let Some(cells) = cells {
            states.insert(b, cells);
        }
    }
    (states, dropped)
}

fn vertex_position(map: &BlockMap, states: &CellStates, key: VertexKey) -> Point3<f64> {
    let (owner, axis, side) = (key.0, key.1 as usize, key.2 as usize);
    let (b, i) = block_of(owner);
    let offset = states
        .get(&b)
        .map(|cells| cells[i].offsets[axis][side])
        .filter(|t| !t.is_nan())
        .or_else(|| edge_offset(map, owner, axis, side))
        .unwrap_or(0.5);
    let mut p = position_of(owner, map.voxel_size());
    p[axis] += offset * map.voxel_size();
    p
}

/// Emits the triangles of all stored cells and merges shared vertices.
fn triangulate(map: &BlockMap, states: &CellStates) -> TriangleMesh {
    let mut coords: Vec<BlockCoord> = states.keys().copied().collect();
    coords.sort_unstable();
    let parts = par::map_slice(&coords, |b| {
        let mut keys: Vec<VertexKey> = Vec::new();
        let mut positions = Vec::new();
        let mut local: HashMap<VertexKey, u32> = HashMap::new();
        let mut triangles = Vec::new();
        for (i, state) in states[b].iter().enumerate() {
            if !state.has_surface() {
                continue;
            }
            let cell = cell_of(*b, i);
            for &mask in &state.slots {
                if is_trivial(mask) {
                    continue;
                }
                for tri in TRI_TABLE[mask as usize].chunks(3) {
                    if tri[0] < 0 {
                        break;
                    }
                    let mut t = [0u32; 3];
                    for (k, &e) in tri.iter().enumerate() {
                        let (axis, lo, _) = edge_geometry(e as usize);
                        let off = CORNERS[lo];
                        let owner = [cell[0] + off[0], cell[1] + off[1], cell[2] + off[2]];
                        let side = if mask & (1 << lo) != 0 { 0 } else { 1 };
                        let key = (owner, axis as u8, side);
                        t[k] = *local.entry(key).or_insert_with(|| {
                            keys.push(key);
                            positions.push(vertex_position(map, states, key));
                            (keys.len() - 1) as u32
                        });
                    }
                    if REVERSE_TABLE_WINDING {
                        t.swap(1, 2);
                    }
                    triangles.push(t);
                }
            }
        }
        (keys, positions, triangles)
    });

    let mut mesh = TriangleMesh::default();
    let mut global: HashMap<VertexKey, u32> = HashMap::new();
    for (keys, positions, triangles) in parts {
        let remap: Vec<u32> = keys
            .iter()
            .zip(positions)
            .map(|(key, p)| {
                *global.entry(*key).or_insert_with(|| {
                    mesh.vertices.push(p);
                    (mesh.vertices.len() - 1) as u32
                })
            })
            .collect();
        mesh.triangles
            .extend(triangles.iter().map(|t| [remap[t[0] as usize], remap[t[1] as usize], remap[t[2] as usize]]));
    }
    mesh
}

/// Directional marching cubes over a directional volume.
pub fn extract_mesh_with_stats(map: &BlockMap, cfg: &MeshConfig) -> Result<(TriangleMesh, MeshStats)> {
    if map.layout() != Layout::Directional {
        return Err(Error::Config(
            "directional marching cubes needs a directional volume".into(),
        ));
    }
    let start = Instant::now();
    let h = map.voxel_size();
    let tau = map.truncation();
    let (mut states, dropped) =
        analyze_blocks(map, |nb, cell| analyze_directional(nb, cell, h, tau, cfg));

    let mut field: SlotField = states
        .iter()
        .map(|(b, cells)| (*b, cells.iter().map(|c| c.slots).collect()))
        .collect();
    let regularized = regularize(&mut field, cfg.regularization_sweeps);
    for (b, slots) in &field {
        let cells = states.get_mut(b).expect("slot field mirrors cell states");
        for (cell, s) in cells.iter_mut().zip(slots) {
            cell.slots = *s;
        }
    }

    let mesh = triangulate(map, &states);
    let stats = MeshStats {
        cells_with_surface: states.values().flatten().filter(|c| c.has_surface()).count(),
        dropped_components: dropped,
        regularized_bits: regularized,
        vertices: mesh.vertex_count(),
        triangles: mesh.triangle_count(),
        elapsed: start.elapsed(),
    };
    Ok((mesh, stats))
}

/// Directional marching cubes over a directional volume.
pub fn extract_mesh(map: &BlockMap, cfg: &MeshConfig) -> Result<TriangleMesh> {
    extract_mesh_with_stats(map, cfg).map(|(mesh, _)| mesh)
}

/// Classic marching cubes over an undirected volume, with linear interpolation on edges.
pub fn classic_mc(map: &BlockMap) -> Result<TriangleMesh> {
    if map.layout() != Layout::Undirected {
        return Err(Error::Config("classic marching cubes needs an undirected volume".into()));
    }
    let (states, _) = analyze_blocks(map, |nb, cell| (analyze_classic(nb, cell), 0));
    Ok(triangulate(map, &states))
}

/// Meshes a volume with the algorithm matching its layout.
pub fn mesh_volume(map: &BlockMap, cfg: &MeshConfig) -> Result<TriangleMesh> {
    match map.layout() {
        Layout::Directional => extract_mesh(map, cfg),
        Layout::Undirected => classic_mc(map),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshing::cube::components;
    use nalgebra::Vector3;

    fn table_edges(mask: u8) -> Vec<usize> {
        TRI_TABLE[mask as usize]
            .iter()
            .take_while(|&&e| e >= 0)
            .map(|&e| e as usize)
            .collect()
    }

    fn trilinear_gradient(values: &[f64; 8], p: &Vector3<f64>) -> Vector3<f64> {
        let mut g = Vector3::zeros();
        for (c, off) in CORNERS.iter().enumerate() {
            let f = |a: usize| if off[a] == 1 { p[a] } else { 1.0 - p[a] };
            let df = |a: usize| if off[a] == 1 { 1.0 } else { -1.0 };
            g.x += values[c] * df(0) * f(1) * f(2);
            g.y += values[c] * f(0) * df(1) * f(2);
            g.z += values[c] * f(0) * f(1) * df(2);
        }
        g
    }

    #[test]
    fn table_winding_faces_outward() {
        for mask in 1..255u8 {
            let values: [f64; 8] = std::array::from_fn(|c| if mask & (1 << c) != 0 { -1.0 } else { 1.0 });
            for tri in table_edges(mask).chunks(3) {
                let pts: Vec<Vector3<f64>> = tri
                    .iter()
                    .map(|&e| {
                        let [a, b] = crate::meshing::cube::EDGES[e];
                        let pa = Vector3::from(CORNERS[a].map(|x| x as f64));
                        let pb = Vector3::from(CORNERS[b].map(|x| x as f64));
                        (pa + pb) * 0.5
                    })
                    .collect();
                let mut n = (pts[1] - pts[0]).cross(&(pts[2] - pts[0]));
                if REVERSE_TABLE_WINDING {
                    n = -n;
                }
                let centroid = (pts[0] + pts[1] + pts[2]) / 3.0;
                let g = trilinear_gradient(&values, &centroid);
                assert!(n.dot(&g) > 0.0, "mask {mask:#010b} triangle {tri:?}");
            }
        }
    }

    #[test]
    fn dropping_components_never_adds_edges() {
        for mask in 1..255u8 {
            let comps = components(mask);
            let all = table_edges(mask);
            for subset in 1..(1u32 << comps.len()) {
                let sub = comps
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| subset & (1 << i) != 0)
                    .fold(0u8, |m, (_, c)| m | c);
                for e in table_edges(sub) {
                    assert!(all.contains(&e), "mask {mask:#x} sub {sub:#x} edge {e}");
                }
            }
        }
    }

    #[test]
    fn empty_volume_gives_empty_mesh() {
        let map = BlockMap::new(0.01, 4.0, Layout::Directional).unwrap();
        assert!(extract_mesh(&map, &MeshConfig::default()).unwrap().is_empty());
        let map = BlockMap::new(0.01, 4.0, Layout::Undirected).unwrap();
        assert!(classic_mc(&map).unwrap().is_empty());
        assert!(extract_mesh(&map, &MeshConfig::default()).is_err());
    }
}
