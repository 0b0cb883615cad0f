//! Binary save/resume format for a [`BlockMap`].
//!
//! Layout (little endian): magic `DTSDFVOL`, `u32` version, `u8` layout (0 directional,
//! 1 undirected), `f64` voxel size, `f64` truncation factor, `u64` block count, then per block
//! three `i32` coordinates, a `u8` channel mask and, for each set bit in ascending order,
//! `BLOCK_VOXELS` pairs of `f64` (sdf, weight). Accumulation slots are not stored.

use std::io::{Read, Write};

use super::map::{BlockMap, ChannelSet, Layout, BLOCK_VOXELS};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"DTSDFVOL";
const VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(map: &BlockMap, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&[match map.layout() {
        Layout::Directional => 0u8,
        Layout::Undirected => 1u8,
    }])?;
    out.write_all(&map.voxel_size().to_le_bytes())?;
    out.write_all(&map.truncation_factor().to_le_bytes())?;
    out.write_all(&(map.len() as u64).to_le_bytes())?;

    let mut blocks: Vec<_> = map.blocks().collect();
    blocks.sort_by_key(|b| b.coord());
    let mut buf = Vec::with_capacity(BLOCK_VOXELS * 16);
    for block in blocks {
        for c in block.coord() {
            out.write_all(&c.to_le_bytes())?;
        }
        let mask = block.allocation_mask();
        out.write_all(&[mask.bits()])?;
        for ch in mask.iter() {
            buf.clear();
            for v in block.array(ch).expect("mask lists allocated arrays") {
                buf.extend_from_slice(&v.sdf.to_le_bytes());
                buf.extend_from_slice(&v.weight.to_le_bytes());
            }
            out.write_all(&buf)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(input: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    input.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<BlockMap> {
    let magic: [u8; 8] = read_array(&mut input)?;
    if &magic != MAGIC {
        return Err(Error::Input("not a volume snapshot (bad magic)".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut input)?);
    if version != VERSION {
        return Err(Error::Input(format!("unsupported snapshot version {version}")));
    }
    let layout = match read_array::<1, _>(&mut input)?[0] {
        0 => Layout::Directional,
        1 => Layout::Undirected,
        other => return Err(Error::Input(format!("unknown volume layout tag {other}"))),
    };
    let voxel_size = f64::from_le_bytes(read_array(&mut input)?);
    let factor = f64::from_le_bytes(read_array(&mut input)?);
    let count = u64::from_le_bytes(read_array(&mut input)?);
    let mut map = BlockMap::new(voxel_size, factor, layout)?;

    let mut buf = vec![0u8; BLOCK_VOXELS * 16];
    for _ in 0..count {
        let coord = [
            i32::from_le_bytes(read_array(&mut input)?),
            i32::from_le_bytes(read_array(&mut input)?),
            i32::from_le_bytes(read_array(&mut input)?),
        ];
        let mask = ChannelSet::from_bits(read_array::<1, _>(&mut input)?[0]);
        let block = map.allocate(coord, mask)?;
        for ch in mask.iter() {
            input.read_exact(&mut buf)?;
            let array = block.array_mut(ch).expect("just allocated");
            for (v, chunk) in array.iter_mut().zip(buf.chunks_exact(16)) {
                v.sdf = f64::from_le_bytes(chunk[..8].try_into().unwrap());
                v.weight = f64::from_le_bytes(chunk[8..].try_into().unwrap());
            }
        }
    }
    Ok(map)
}
