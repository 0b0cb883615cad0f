//! Datasets on disk.
//!
//! ```text
//! root/
//!   depth/000000.png ...   16-bit depth images
//!   depth.txt              "timestamp depth/000000.png" per line
//!   groundtruth.txt        camera-to-world trajectory, see [`load_trajectory`]
//!   intrinsics.txt         width, height, fx, fy, cx, cy, depth_scale as key = value
//! ```
//!
//! Depth images are associated with the trajectory pose of nearest timestamp.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::depth::{load_depth_image, save_depth_image, DEFAULT_DEPTH_SCALE};
use super::trajectory::{load_trajectory, read_text, save_trajectory, StampedPose};
use crate::error::{Error, Result};
use crate::fusion::{DepthFrame, Intrinsics};

/// Largest timestamp gap, in seconds, at which a depth image and a pose are associated.
pub const MAX_ASSOCIATION_GAP: f64 = 0.02;

/// Nominal frame interval of written datasets.
pub const FRAME_INTERVAL: f64 = 1.0 / 30.0;

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetEntry {
    pub timestamp: f64,
    pub depth_path: PathBuf,
    pub pose: nalgebra::Isometry3<f64>,
}

/// An opened dataset: associations sorted by timestamp.
#[derive(Clone, Debug)]
pub struct DatasetSource {
    pub root: PathBuf,
    pub entries: Vec<DatasetEntry>,
    pub depth_scale: f64,
    pub intrinsics: Intrinsics,
    pub width: usize,
    pub height: usize,
}

struct CameraInfo {
    width: usize,
    height: usize,
    intrinsics: Intrinsics,
    depth_scale: f64,
}

fn parse_key_values(text: &str, path: &Path) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: "expected key = value".into(),
        })?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn load_camera(path: &Path) -> Result<CameraInfo> {
    let text = read_text(path)?;
    let mut fields: HashMap<String, f64> = HashMap::new();
    for (line, k, v) in parse_key_values(&text, path)? {
        if !["width", "height", "fx", "fy", "cx", "cy", "depth_scale"].contains(&k.as_str()) {
            return Err(Error::Parse { path: path.to_path_buf(), line, message: format!("unknown key {k:?}") });
        }
        let value = v.parse::<f64>().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{k}: not a number: {v:?}"),
        })?;
        fields.insert(k, value);
    }
    let get = |k: &str| {
        fields.get(k).copied().ok_or_else(|| Error::Input(format!("{}: missing key {k:?}", path.display())))
    };
    let dim = |k: &str| -> Result<usize> {
        let v = get(k)?;
        if v >= 1.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(Error::Input(format!("{}: {k} must be a positive integer", path.display())))
        }
    };
    let intrinsics = Intrinsics { fx: get("fx")?, fy: get("fy")?, cx: get("cx")?, cy: get("cy")? };
    intrinsics.validate()?;
    let depth_scale = fields.get("depth_scale").copied().unwrap_or(DEFAULT_DEPTH_SCALE);
    if !(depth_scale > 0.0 && depth_scale.is_finite()) {
        return Err(Error::Config(format!("depth scale must be positive, got {depth_scale}")));
    }
    Ok(CameraInfo { width: dim("width")?, height: dim("height")?, intrinsics, depth_scale })
}

fn load_depth_list(path: &Path) -> Result<Vec<(f64, PathBuf)>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| Error::Parse { path: path.to_path_buf(), line: i + 1, message: message.into() };
        let mut parts = line.split_whitespace();
        let t = parts.next().and_then(|t| t.parse::<f64>().ok()).ok_or_else(|| err("bad timestamp"))?;
        let file = parts.next().ok_or_else(|| err("missing file name"))?;
        if parts.next().is_some() {
            return Err(err("trailing fields"));
        }
        out.push((t, PathBuf::from(file)));
    }
    Ok(out)
}

fn nearest(poses: &[StampedPose], t: f64) -> Option<&StampedPose> {
    let i = poses.partition_point(|p| p.timestamp < t);
    [i.checked_sub(1), Some(i)]
        .into_iter()
        .flatten()
        .filter_map(|j| poses.get(j))
        .min_by(|a, b| (a.timestamp - t).abs().total_cmp(&(b.timestamp - t).abs()))
        .filter(|p| (p.timestamp - t).abs() <= MAX_ASSOCIATION_GAP)
}

impl DatasetSource {
    pub fn open(root: &Path) -> Result<DatasetSource> {
        if !root.is_dir() {
            return Err(Error::NotFound(root.to_path_buf()));
        }
        let camera = load_camera(&root.join("intrinsics.txt"))?;
        let depth = load_depth_list(&root.join("depth.txt"))?;
        let mut poses = load_trajectory(&root.join("groundtruth.txt"))?;
        poses.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
        let mut entries = Vec::with_capacity(depth.len());
        for (t, rel) in depth {
            let depth_path = root.join(&rel);
            if !depth_path.is_file() {
                return Err(Error::NotFound(depth_path));
            }
            match nearest(&poses, t) {
                Some(p) => entries.push(DatasetEntry { timestamp: t, depth_path, pose: p.pose }),
                None => log::warn!("no pose within {MAX_ASSOCIATION_GAP} s of depth image at t={t}; skipped"),
            }
        }
        entries.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
        Ok(DatasetSource {
            root: root.to_path_buf(),
            entries,
            depth_scale: camera.depth_scale,
            intrinsics: camera.intrinsics,
            width: camera.width,
            height: camera.height,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Loads frame `index` with its associated pose.
    pub fn frame(&self, index: usize) -> Result<DepthFrame> {
        let entry = self
            .entries
            .get(index)
            .ok_or_else(|| Error::Input(format!("frame {index} out of range ({} frames)", self.len())))?;
        let mut frame = load_depth_image(&entry.depth_path, self.depth_scale, self.intrinsics)?;
        if frame.width != self.width || frame.height != self.height {
            return Err(Error::Input(format!(
                "{} is {}x{}, dataset declares {}x{}",
                entry.depth_path.display(),
                frame.width,
                frame.height,
                self.width,
                self.height
            )));
        }
        frame.pose = entry.pose;
        Ok(frame)
    }
}

/// Writes frames as a dataset, creating `root` if needed. Frame `i` gets timestamp
/// `i * FRAME_INTERVAL`. All frames must share one camera.
pub fn write_dataset(root: &Path, frames: &[DepthFrame], depth_scale: f64) -> Result<()> {
    let first = frames.first();
    if let Some(f) = first {
        if frames.iter().any(|g| g.width != f.width || g.height != f.height || g.intrinsics != f.intrinsics) {
            return Err(Error::Input("frames of a dataset must share one camera".into()));
        }
    }
    std::fs::create_dir_all(root.join("depth"))?;
    let mut list = String::from("# timestamp filename\n");
    let mut poses = Vec::with_capacity(frames.len());
    for (i, frame) in frames.iter().enumerate() {
        let timestamp = i as f64 * FRAME_INTERVAL;
        let rel = format!("depth/{i:06}.png");
        save_depth_image(&root.join(&rel), frame, depth_scale)?;
        let _ = writeln!(list, "{timestamp} {rel}");
        poses.push(StampedPose { timestamp, pose: frame.pose });
    }
    std::fs::write(root.join("depth.txt"), list)?;
    save_trajectory(&root.join("groundtruth.txt"), &poses)?;
    let (w, h, k) = first.map_or((1, 1, Intrinsics::kinect()), |f| (f.width, f.height, f.intrinsics));
    let camera = format!(
        "width = {w}\nheight = {h}\nfx = {}\nfy = {}\ncx = {}\ncy = {}\ndepth_scale = {depth_scale}\n",
        k.fx, k.fy, k.cx, k.cy
    );
    std::fs::write(root.join("intrinsics.txt"), camera)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Isometry3, Vector3};

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let k = Intrinsics::new(50.0, 2.0, 1.5);
        let frames: Vec<DepthFrame> = (0..3)
            .map(|i| {
                let pose = Isometry3::new(Vector3::new(i as f64, 0.0, 0.0), Vector3::new(0.0, 0.1 * i as f64, 0.0));
                DepthFrame::new(4, 3, vec![1.0 + i as f32; 12], k, pose).unwrap()
            })
            .collect();
        let root = dir.path().join("nested/ds");
        write_dataset(&root, &frames, DEFAULT_DEPTH_SCALE).unwrap();
        let ds = DatasetSource::open(&root).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.intrinsics, k);
        for (i, f) in frames.iter().enumerate() {
            let g = ds.frame(i).unwrap();
            assert_eq!(g.depth, f.depth);
            assert!((g.pose.translation.vector - f.pose.translation.vector).norm() < 1e-12);
        }
    }

    #[test]
    fn missing_image_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let k = Intrinsics::new(50.0, 2.0, 1.5);
        let f = DepthFrame::new(2, 2, vec![1.0; 4], k, Isometry3::identity()).unwrap();
        write_dataset(dir.path(), &[f], DEFAULT_DEPTH_SCALE).unwrap();
        std::fs::remove_file(dir.path().join("depth/000000.png")).unwrap();
        assert!(matches!(DatasetSource::open(dir.path()), Err(Error::NotFound(_))));
    }
}
