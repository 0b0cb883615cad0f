use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dtsdf::FusionPreset;

#[derive(Parser, Debug)]
#[command(name = "dtsdf", version, about = "Directional TSDF fusion, meshing and evaluation")]
pub struct Cli {
    /// Worker threads (default: hardware parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Render a synthetic depth dataset.
    Render(RenderArgs),
    /// Fuse a dataset into a volume snapshot.
    Fuse(FuseArgs),
    /// Extract a mesh from a volume snapshot.
    Mesh(MeshArgs),
    /// Measure a mesh against a reference.
    Eval(EvalArgs),
    /// Run every scene x mode x voxel size combination and tabulate the results.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Scene file (TOML) or built-in scene name (sphere, slab, composite).
    #[arg(long)]
    pub scene: String,
    /// Output dataset directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Override the number of frames of the orbit.
    #[arg(long)]
    pub frames: Option<usize>,
    #[arg(long)]
    pub noise_sigma0: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct FusionArgs {
    /// Fusion config file (key = value).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Mode preset; overrides the mode, metric and layout of the config file.
    #[arg(long, value_parser = parse_preset)]
    pub mode: Option<FusionPreset>,
    #[arg(long)]
    pub voxel_size: Option<f64>,
    #[arg(long)]
    pub trunc_factor: Option<f64>,
}

#[derive(Args, Debug)]
pub struct FuseArgs {
    /// Dataset directory as written by `render`.
    #[arg(long)]
    pub dataset: PathBuf,
    #[command(flatten)]
    pub fusion: FusionArgs,
    /// Output volume snapshot.
    #[arg(long)]
    pub out: PathBuf,
    /// Extract a mesh after every N frames to measure incremental update cost.
    #[arg(long)]
    pub mesh_every: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MeshArgs {
    /// Volume snapshot written by `fuse`.
    #[arg(long)]
    pub volume: PathBuf,
    /// Output mesh (.ply or .obj).
    #[arg(long)]
    pub out: PathBuf,
    /// Plain marching cubes; only valid for undirected volumes.
    #[arg(long)]
    pub baseline: bool,
    #[arg(long, default_value_t = 2)]
    pub regularization_sweeps: usize,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Mesh to measure (.ply or .obj).
    #[arg(long)]
    pub mesh: PathBuf,
    /// Scene file, built-in scene name, or reference mesh (.ply or .obj).
    #[arg(long)]
    pub reference: String,
    /// Report file (key = value); printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Heatmap PLY colored by distance.
    #[arg(long)]
    pub heatmap: Option<PathBuf>,
    /// Distance mapped to full red [default: 4 x voxel size].
    #[arg(long)]
    pub clamp_max: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub voxel_size: f64,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Scene files or built-in scene names.
    #[arg(long, value_delimiter = ',', required = true)]
    pub scenes: Vec<String>,
    #[arg(long, value_delimiter = ',', value_parser = parse_preset, required = true)]
    pub modes: Vec<FusionPreset>,
    /// Voxel sizes in meters.
    #[arg(long, value_delimiter = ',', required = true)]
    pub voxel_sizes: Vec<f64>,
    #[arg(long)]
    pub trunc_factor: Option<f64>,
    #[arg(long)]
    pub frames: Option<usize>,
    /// Output CSV; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_preset(s: &str) -> Result<FusionPreset, String> {
    s.parse::<FusionPreset>().map_err(|e| e.to_string())
}
