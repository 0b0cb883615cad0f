//! Trajectories as text, one `timestamp tx ty tz qx qy qz qw` record per line.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Isometry3, Quaternion, Translation3, UnitQuaternion};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct StampedPose {
    pub timestamp: f64,
    /// Camera-to-world transform.
    pub pose: Isometry3<f64>,
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::NotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

/// Parses trajectory text. Blank lines and `#` comments are skipped.
pub fn parse_trajectory(text: &str, path: &Path) -> Result<Vec<StampedPose>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { path: path.to_path_buf(), line: i + 1, message };
        let values = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(format!("not a number: {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != 8 {
            return Err(err(format!("expected 8 fields, found {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(err("non-finite value".into()));
        }
        let q = Quaternion::new(values[7], values[4], values[5], values[6]);
        if q.norm() < 1e-12 {
            return Err(err("zero quaternion".into()));
        }
        let rotation = UnitQuaternion::from_quaternion(q);
        let translation = Translation3::new(values[1], values[2], values[3]);
        out.push(StampedPose { timestamp: values[0], pose: Isometry3::from_parts(translation, rotation) });
    }
    Ok(out)
}

pub fn load_trajectory(path: &Path) -> Result<Vec<StampedPose>> {
    parse_trajectory(&read_text(path)?, path)
}

pub fn format_trajectory(poses: &[StampedPose]) -> String {
    let mut s = String::from("# timestamp tx ty tz qx qy qz qw\n");
    for p in poses {
        let t = p.pose.translation.vector;
        let q = p.pose.rotation.quaternion();
        let _ = writeln!(s, "{} {} {} {} {} {} {} {}", p.timestamp, t.x, t.y, t.z, q.i, q.j, q.k, q.w);
    }
    s
}

pub fn save_trajectory(path: &Path, poses: &[StampedPose]) -> Result<()> {
    std::fs::write(path, format_trajectory(poses))?;
    Ok(())
}
