use std::fmt;
use std::str::FromStr;

use super::frame::DepthRange;
use crate::error::{Error, Result};
use crate::volume::{Layout, DIRECTION_THRESHOLD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FusionMode {
    /// Project every voxel in the frustum onto its nearest pixel.
    VoxelProjection,
    /// Walk the voxels along each pixel's line of sight.
    RayCasting,
    /// Walk the voxels along each measurement's surface normal, in both directions.
    NormalRayCasting,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DistanceMetric {
    PointToPoint,
    PointToPlane,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BilateralParams {
    /// Window half-width in pixels.
    pub radius: usize,
    pub sigma_spatial: f64,
    /// Range kernel width in meters.
    pub sigma_range: f64,
}

impl Default for BilateralParams {
    fn default() -> Self {
        BilateralParams { radius: 2, sigma_spatial: 2.0, sigma_range: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FusionConfig {
    pub voxel_size: f64,
    pub truncation_factor: f64,
    pub mode: FusionMode,
    pub metric: DistanceMetric,
    /// Directional TSDF when set, classic TSDF otherwise.
    pub directional: bool,
    /// Upper bound of a single measurement's weight.
    pub max_sample_weight: f64,
    /// Upper bound of a voxel's accumulated weight.
    pub max_voxel_weight: f64,
    pub bilateral: BilateralParams,
    pub direction_threshold: f64,
    pub depth_range: DepthRange,
    /// Normals are not estimated across depth steps larger than this fraction of the depth.
    pub normal_max_depth_jump: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            voxel_size: 0.01,
            truncation_factor: 4.0,
            mode: FusionMode::NormalRayCasting,
            metric: DistanceMetric::PointToPlane,
            directional: true,
            max_sample_weight: 1.0,
            max_voxel_weight: 255.0,
            bilateral: BilateralParams::default(),
            direction_threshold: DIRECTION_THRESHOLD,
            depth_range: DepthRange::default(),
            normal_max_depth_jump: 0.05,
        }
    }
}

impl FusionConfig {
    pub fn from_preset(preset: FusionPreset, voxel_size: f64) -> FusionConfig {
        let mut cfg = FusionConfig { voxel_size, ..Default::default() };
        preset.apply(&mut cfg);
        cfg
    }

    pub fn truncation(&self) -> f64 {
        self.truncation_factor * self.voxel_size
    }

    pub fn layout(&self) -> Layout {
        if self.directional {
            Layout::Directional
        } else {
            Layout::Undirected
        }
    }

    /// Whether fusion needs a normal map for this configuration.
    pub fn requires_normals(&self) -> bool {
        self.directional
            || self.mode == FusionMode::NormalRayCasting
            || self.metric == DistanceMetric::PointToPlane
    }

    /// The preset this configuration corresponds to, if any.
    pub fn preset(&self) -> Option<FusionPreset> {
        FusionPreset::ALL.into_iter().find(|p| {
            let mut c = self.clone();
            p.apply(&mut c);
            c == *self
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("voxel_size", self.voxel_size)?;
        if !(self.truncation_factor.is_finite() && self.truncation_factor >= 1.0) {
            return Err(Error::Config(format!(
                "truncation_factor must be at least 1, got {}",
                self.truncation_factor
            )));
        }
        positive("max_sample_weight", self.max_sample_weight)?;
        positive("max_voxel_weight", self.max_voxel_weight)?;
        positive("bilateral_sigma_spatial", self.bilateral.sigma_spatial)?;
        positive("bilateral_sigma_range", self.bilateral.sigma_range)?;
        positive("normal_max_depth_jump", self.normal_max_depth_jump)?;
        if !(0.0..1.0).contains(&self.direction_threshold) {
            return Err(Error::Config(format!(
                "direction_threshold must lie in [0, 1), got {}",
                self.direction_threshold
            )));
        }
        let r = self.depth_range;
        if !(r.min >= 0.0 && r.max > r.min && r.max.is_finite()) {
            return Err(Error::Config(format!("invalid depth range ({}, {})", r.min, r.max)));
        }
        Ok(())
    }
}

/// The six evaluated mode combinations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FusionPreset {
    DefVp,
    DefRcP2pl,
    DefRcnP2pl,
    DirVp,
    DirRcP2pl,
    DirRcnP2pl,
}

impl FusionPreset {
    pub const ALL: [FusionPreset; 6] = [
        FusionPreset::DefVp,
        FusionPreset::DefRcP2pl,
        FusionPreset::DefRcnP2pl,
        FusionPreset::DirVp,
        FusionPreset::DirRcP2pl,
        FusionPreset::DirRcnP2pl,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FusionPreset::DefVp => "def-vp",
            FusionPreset::DefRcP2pl => "def-rc-p2pl",
            FusionPreset::DefRcnP2pl => "def-rcn-p2pl",
            FusionPreset::DirVp => "dir-vp",
            FusionPreset::DirRcP2pl => "dir-rc-p2pl",
            FusionPreset::DirRcnP2pl => "dir-rcn-p2pl",
        }
    }

    pub fn directional(self) -> bool {
        matches!(self, FusionPreset::DirVp | FusionPreset::DirRcP2pl | FusionPreset::DirRcnP2pl)
    }

    pub fn mode(self) -> FusionMode {
        match self {
            FusionPreset::DefVp | FusionPreset::DirVp => FusionMode::VoxelProjection,
            FusionPreset::DefRcP2pl | FusionPreset::DirRcP2pl => FusionMode::RayCasting,
            FusionPreset::DefRcnP2pl | FusionPreset::DirRcnP2pl => FusionMode::NormalRayCasting,
        }
    }

    pub fn metric(self) -> DistanceMetric {
        match self.mode() {
            FusionMode::VoxelProjection => DistanceMetric::PointToPoint,
            _ => DistanceMetric::PointToPlane,
        }
    }

    pub fn apply(self, cfg: &mut FusionConfig) {
        cfg.directional = self.directional();
        cfg.mode = self.mode();
        cfg.metric = self.metric();
    }
}

impl fmt::Display for FusionPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FusionPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FusionPreset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown fusion mode `{s}`")))
    }
}
