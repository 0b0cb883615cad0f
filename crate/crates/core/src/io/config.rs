//! Fusion configuration as `key = value` text.
//!
//! Every [`FusionConfig`] field has a key; absent keys keep their defaults. Blank lines and
//! `#` comments are ignored, unknown or repeated keys are errors.
//!
//! | key | value |
//! |-----|-------|
//! | `voxel_size`, `truncation_factor` | meters, multiple of the voxel size |
//! | `mode` | `vp`, `rc` or `rcn` |
//! | `metric` | `p2p` or `p2pl` |
//! | `directional` | `true` or `false` |
//! | `max_sample_weight`, `max_voxel_weight` | weight caps |
//! | `bilateral_radius`, `bilateral_sigma_spatial`, `bilateral_sigma_range` | normal-estimation smoothing |
//! | `direction_threshold` | direction assignment margin |
//! | `depth_min`, `depth_max` | valid depth interval in meters |
//! | `normal_max_depth_jump` | relative depth step that invalidates a normal |

use std::fmt::Write as _;
use std::path::Path;

use super::trajectory::read_text;
use crate::error::{Error, Result};
use crate::fusion::{DistanceMetric, FusionConfig, FusionMode};

pub fn mode_name(mode: FusionMode) -> &'static str {
    match mode {
        FusionMode::VoxelProjection => "vp",
        FusionMode::RayCasting => "rc",
        FusionMode::NormalRayCasting => "rcn",
    }
}

pub fn metric_name(metric: DistanceMetric) -> &'static str {
    match metric {
        DistanceMetric::PointToPoint => "p2p",
        DistanceMetric::PointToPlane => "p2pl",
    }
}

pub fn format_config(cfg: &FusionConfig) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    kv("voxel_size", cfg.voxel_size.to_string());
    kv("truncation_factor", cfg.truncation_factor.to_string());
    kv("mode", mode_name(cfg.mode).into());
    kv("metric", metric_name(cfg.metric).into());
    kv("directional", cfg.directional.to_string());
    kv("max_sample_weight", cfg.max_sample_weight.to_string());
    kv("max_voxel_weight", cfg.max_voxel_weight.to_string());
    kv("bilateral_radius", cfg.bilateral.radius.to_string());
    kv("bilateral_sigma_spatial", cfg.bilateral.sigma_spatial.to_string());
    kv("bilateral_sigma_range", cfg.bilateral.sigma_range.to_string());
    kv("direction_threshold", cfg.direction_threshold.to_string());
    kv("depth_min", cfg.depth_range.min.to_string());
    kv("depth_max", cfg.depth_range.max.to_string());
    kv("normal_max_depth_jump", cfg.normal_max_depth_jump.to_string());
    s
}

/// Parses and validates configuration text.
pub fn parse_config(text: &str, path: &Path) -> Result<FusionConfig> {
    let mut cfg = FusionConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::Parse { path: path.to_path_buf(), line: i + 1, message };
        let (key, value) = line.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
        let (key, value) = (key.trim(), value.trim());
        if seen.iter().any(|k| k == key) {
            return Err(err(format!("duplicate key {key:?}")));
        }
        let float = || value.parse::<f64>().map_err(|_| err(format!("{key}: expected a number, found {value:?}")));
        match key {
            "voxel_size" => cfg.voxel_size = float()?,
            "truncation_factor" => cfg.truncation_factor = float()?,
            "mode" => {
                cfg.mode = match value {
                    "vp" => FusionMode::VoxelProjection,
                    "rc" => FusionMode::RayCasting,
                    "rcn" => FusionMode::NormalRayCasting,
                    _ => return Err(err(format!("mode: expected vp, rc or rcn, found {value:?}"))),
                }
            }
            "metric" => {
                cfg.metric = match value {
                    "p2p" => DistanceMetric::PointToPoint,
                    "p2pl" => DistanceMetric::PointToPlane,
                    _ => return Err(err(format!("metric: expected p2p or p2pl, found {value:?}"))),
                }
            }
            "directional" => {
                cfg.directional = value.parse().map_err(|_| err(format!("directional: expected true or false, found {value:?}")))?
            }
            "max_sample_weight" => cfg.max_sample_weight = float()?,
            "max_voxel_weight" => cfg.max_voxel_weight = float()?,
            "bilateral_radius" => {
                cfg.bilateral.radius =
                    value.parse().map_err(|_| err(format!("bilateral_radius: expected an integer, found {value:?}")))?
            }
            "bilateral_sigma_spatial" => cfg.bilateral.sigma_spatial = float()?,
            "bilateral_sigma_range" => cfg.bilateral.sigma_range = float()?,
            "direction_threshold" => cfg.direction_threshold = float()?,
            "depth_min" => cfg.depth_range.min = float()?,
            "depth_max" => cfg.depth_range.max = float()?,
            "normal_max_depth_jump" => cfg.normal_max_depth_jump = float()?,
            _ => return Err(err(format!("unknown key {key:?}"))),
        }
        seen.push(key.to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<FusionConfig> {
    parse_config(&read_text(path)?, path)
}

pub fn save_config(path: &Path, cfg: &FusionConfig) -> Result<()> {
    cfg.validate()?;
    std::fs::write(path, format_config(cfg))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::FusionPreset;

    fn parse(text: &str) -> Result<FusionConfig> {
        parse_config(text, Path::new("c.cfg"))
    }

    #[test]
    fn round_trip() {
        for p in FusionPreset::ALL {
            let mut cfg = FusionConfig::from_preset(p, 0.013);
            cfg.bilateral.sigma_range = 0.1 + 0.2;
            assert_eq!(parse(&format_config(&cfg)).unwrap(), cfg);
        }
    }

    #[test]
    fn defaults_for_absent_keys() {
        assert_eq!(parse("# nothing\n\n").unwrap(), FusionConfig::default());
        assert_eq!(parse("voxel_size = 0.02").unwrap().truncation_factor, FusionConfig::default().truncation_factor);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse("voxel_size = -1"), Err(Error::Config(_))));
        assert!(matches!(parse("colour = red"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("\nvoxel_size = big"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("mode = vp\nmode = rc"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("directional = 1"), Err(Error::Parse { .. })));
    }
}
