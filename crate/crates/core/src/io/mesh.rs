//! Mesh files: binary little-endian PLY and ASCII OBJ.
//!
//! PLY vertices carry `float x, y, z` and, when the mesh has scalars, `uchar red, green, blue`
//! from [`colormap`]. Faces are `list uchar int vertex_indices`.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::Point3;

use crate::error::{Error, Result};
use crate::meshing::TriangleMesh;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Ply,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<MeshFormat> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("ply") => Ok(MeshFormat::Ply),
            Some("obj") => Ok(MeshFormat::Obj),
            _ => Err(Error::Input(format!("{}: unknown mesh format (expected .ply or .obj)", path.display()))),
        }
    }
}

/// Linear blue-to-red ramp over `[0, 1]`; values outside are clamped.
pub fn colormap(s: f64) -> [u8; 3] {
    let s = if s.is_nan() { 1.0 } else { s.clamp(0.0, 1.0) };
    [(255.0 * s).round() as u8, 0, (255.0 * (1.0 - s)).round() as u8]
}

pub fn export_mesh(mesh: &TriangleMesh, path: &Path, format: MeshFormat) -> Result<()> {
    mesh.validate()?;
    let file = std::fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    match format {
        MeshFormat::Ply => write_ply(mesh, &mut out)?,
        MeshFormat::Obj => out.write_all(obj_text(mesh).as_bytes())?,
    }
    out.flush()?;
    Ok(())
}

/// Writes in the format named by the extension.
pub fn save_mesh(mesh: &TriangleMesh, path: &Path) -> Result<()> {
    export_mesh(mesh, path, MeshFormat::from_path(path)?)
}

pub fn write_ply<W: Write>(mesh: &TriangleMesh, out: &mut W) -> Result<()> {
    let colors = mesh.scalars.as_ref().map(|s| s.iter().map(|&v| colormap(v)).collect::<Vec<_>>());
    let mut header = String::from("ply\nformat binary_little_endian 1.0\n");
    let _ = writeln!(header, "element vertex {}", mesh.vertex_count());
    header.push_str("property float x\nproperty float y\nproperty float z\n");
    if colors.is_some() {
        header.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    }
    let _ = writeln!(header, "element face {}", mesh.triangle_count());
    header.push_str("property list uchar int vertex_indices\nend_header\n");
    out.write_all(header.as_bytes())?;
    for (i, v) in mesh.vertices.iter().enumerate() {
        for c in v.iter() {
            out.write_all(&(*c as f32).to_le_bytes())?;
        }
        if let Some(colors) = &colors {
            out.write_all(&colors[i])?;
        }
    }
    for t in &mesh.triangles {
        out.write_all(&[3])?;
        for &i in t {
            out.write_all(&(i as i32).to_le_bytes())?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Scalar {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl Scalar {
    fn parse(s: &str) -> Option<Scalar> {
        Some(match s {
            "char" | "int8" => Scalar::I8,
            "uchar" | "uint8" => Scalar::U8,
            "short" | "int16" => Scalar::I16,
            "ushort" | "uint16" => Scalar::U16,
            "int" | "int32" => Scalar::I32,
            "uint" | "uint32" => Scalar::U32,
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            _ => return None,
        })
    }

    fn read<R: Read>(self, r: &mut R) -> std::io::Result<f64> {
        macro_rules! rd {
            ($t:ty) => {{
                let mut b = [0u8; std::mem::size_of::<$t>()];
                r.read_exact(&mut b)?;
                <$t>::from_le_bytes(b) as f64
            }};
        }
        Ok(match self {
            Scalar::I8 => rd!(i8),
            Scalar::U8 => rd!(u8),
            Scalar::I16 => rd!(i16),
            Scalar::U16 => rd!(u16),
            Scalar::I32 => rd!(i32),
            Scalar::U32 => rd!(u32),
            Scalar::F32 => rd!(f32),
            Scalar::F64 => rd!(f64),
        })
    }
}

enum Property {
    Value(String, Scalar),
    List(String, Scalar, Scalar),
}

struct Element {
    name: String,
    count: usize,
    properties: Vec<Property>,
}

/// Reads a binary little-endian PLY with triangle or polygon faces (polygons are fanned).
pub fn read_ply(path: &Path) -> Result<TriangleMesh> {
    let file = std::fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::NotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    let mut r = BufReader::new(file);
    let err = |line: usize, message: &str| Error::Parse { path: path.to_path_buf(), line, message: message.into() };
    let mut elements: Vec<Element> = Vec::new();
    let mut line_no = 0;
    loop {
        let mut line = String::new();
        if r.read_line(&mut line)? == 0 {
            return Err(err(line_no, "header ends before end_header"));
        }
        line_no += 1;
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["ply"] if line_no == 1 => {}
            _ if line_no == 1 => return Err(err(1, "not a PLY file")),
            ["format", "binary_little_endian", _] => {}
            ["format", ..] => return Err(err(line_no, "only binary_little_endian PLY is supported")),
            ["comment", ..] | ["obj_info", ..] => {}
            ["element", name, count] => {
                let count = count.parse().map_err(|_| err(line_no, "bad element count"))?;
                elements.push(Element { name: name.to_string(), count, properties: Vec::new() });
            }
            ["property", "list", c, t, name] => {
                let (c, t) = Scalar::parse(c).zip(Scalar::parse(t)).ok_or_else(|| err(line_no, "bad list type"))?;
                elements.last_mut().ok_or_else(|| err(line_no, "property before element"))?.properties.push(Property::List(
                    name.to_string(),
                    c,
                    t,
                ));
            }
            ["property", t, name] => {
                let t = Scalar::parse(t).ok_or_else(|| err(line_no, "bad property type"))?;
                elements
                    .last_mut()
                    .ok_or_else(|| err(line_no, "property before element"))?
                    .properties
                    .push(Property::Value(name.to_string(), t));
            }
            ["end_header"] => break,
            _ => return Err(err(line_no, "unrecognized header line")),
        }
    }
    let truncated = |e: std::io::Error| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Input(format!("{}: truncated PLY body", path.display())),
        _ => Error::Io(e),
    };
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for el in &elements {
        for _ in 0..el.count {
            let mut xyz = [f64::NAN; 3];
            for prop in &el.properties {
                match prop {
                    Property::Value(name, t) => {
                        let v = t.read(&mut r).map_err(truncated)?;
                        match name.as_str() {
                            "x" => xyz[0] = v,
                            "y" => xyz[1] = v,
                            "z" => xyz[2] = v,
                            _ => {}
                        }
                    }
                    Property::List(name, c, t) => {
                        let n = c.read(&mut r).map_err(truncated)? as usize;
                        let mut idx = Vec::with_capacity(n);
                        for _ in 0..n {
                            idx.push(t.read(&mut r).map_err(truncated)? as u32);
                        }
                        if el.name == "face" && (name == "vertex_indices" || name == "vertex_index") {
                            for k in 1..n.saturating_sub(1) {
                                triangles.push([idx[0], idx[k], idx[k + 1]]);
                            }
                        }
                    }
                }
            }
            if el.name == "vertex" {
                if xyz.iter().any(|v| v.is_nan()) {
                    return Err(Error::Input(format!("{}: vertex without x, y, z", path.display())));
                }
                vertices.push(Point3::from(xyz));
            }
        }
    }
    let mesh = TriangleMesh::new(vertices, triangles);
    mesh.validate()?;
    Ok(mesh)
}

pub fn obj_text(mesh: &TriangleMesh) -> String {
    let mut s = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
    }
    for t in &mesh.triangles {
        let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    s
}

/// Reads `v` and `f` records of an OBJ file; other records are ignored and polygons are fanned.
pub fn read_obj(path: &Path) -> Result<TriangleMesh> {
    let text = super::trajectory::read_text(path)?;
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |message: &str| Error::Parse { path: path.to_path_buf(), line: i + 1, message: message.into() };
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let c: Vec<f64> = parts.take(3).map(|t| t.parse().map_err(|_| err("bad vertex"))).collect::<Result<_>>()?;
                if c.len() != 3 {
                    return Err(err("vertex needs three coordinates"));
                }
                vertices.push(Point3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<u32> = parts
                    .map(|t| {
                        let first = t.split('/').next().unwrap_or("");
                        match first.parse::<i64>() {
                            Ok(k) if k > 0 => Ok((k - 1) as u32),
                            Ok(k) if k < 0 && (-k) as usize <= vertices.len() => Ok((vertices.len() as i64 + k) as u32),
                            _ => Err(err("bad face index")),
                        }
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(err("face needs three vertices"));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    let mesh = TriangleMesh::new(vertices, triangles);
    mesh.validate()?;
    Ok(mesh)
}

/// Reads in the format named by the extension.
pub fn load_mesh(path: &Path) -> Result<TriangleMesh> {
    match MeshFormat::from_path(path)? {
        MeshFormat::Ply => read_ply(path),
        MeshFormat::Obj => read_obj(path),
    }
}
