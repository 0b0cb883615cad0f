use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use dtsdf::eval::{heatmap_scalars, mesh_to_reference_distances, timing_report, Reference};
use dtsdf::io::{self, DatasetSource, DEFAULT_DEPTH_SCALE};
use dtsdf::meshing::{classic_mc, mesh_volume, MeshConfig};
use dtsdf::pipeline::{render_frames, run_frames};
use dtsdf::scenes::{ScenePreset, SceneFile};
use dtsdf::volume::{read_snapshot, write_snapshot, BlockMap, Layout};
use dtsdf::{integrate, FusionConfig};

use crate::args::{EvalArgs, FuseArgs, FusionArgs, MeshArgs, RenderArgs, SweepArgs};
use crate::CliError;

fn positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(CliError::Usage(format!("--{name} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

/// Scene file path or built-in scene name, plus a label for reports.
fn load_scene(scene_arg: &str) -> Result<(String, SceneFile), CliError> {
    if let Ok(preset) = ScenePreset::from_str(scene_arg) {
        return Ok((preset.name().to_string(), preset.scene_file()));
    }
    let path = Path::new(scene_arg);
    let label = path.file_stem().map_or_else(|| scene_arg.to_string(), |s| s.to_string_lossy().into_owned());
    Ok((label, SceneFile::load(path)?))
}

fn fusion_config(a: &FusionArgs) -> Result<FusionConfig, CliError> {
    positive("voxel-size", a.voxel_size)?;
    positive("trunc-factor", a.trunc_factor)?;
    let mut cfg = match &a.config {
        Some(path) => io::load_config(path)?,
        None => FusionConfig::default(),
    };
    if let Some(preset) = a.mode {
        preset.apply(&mut cfg);
    }
    if let Some(h) = a.voxel_size {
        cfg.voxel_size = h;
    }
    if let Some(t) = a.trunc_factor {
        cfg.truncation_factor = t;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

pub fn render(a: RenderArgs) -> Result<(), CliError> {
    positive("noise-sigma0", a.noise_sigma0.filter(|&s| s != 0.0))?;
    let (_, mut file) = load_scene(&a.scene)?;
    if let Some(n) = a.frames {
        if n == 0 {
            return Err(CliError::Usage("--frames must be at least 1".into()));
        }
        file.trajectory.frames = n;
    }
    if let Some(s) = a.noise_sigma0 {
        file.camera.noise_sigma0 = s;
    }
    if let Some(seed) = a.seed {
        file.camera.seed = seed;
    }
    file.validate()?;
    if file.scene.shapes.is_empty() {
        log::warn!("scene has no shapes; every depth image will be empty");
    }
    let frames = render_frames(&file);
    io::write_dataset(&a.out, &frames, DEFAULT_DEPTH_SCALE)?;
    file.save(&a.out.join("scene.toml"))?;
    println!("frames={}\nout={}", frames.len(), a.out.display());
    Ok(())
}

pub fn fuse(a: FuseArgs) -> Result<(), CliError> {
    let cfg = fusion_config(&a.fusion)?;
    if a.mesh_every == Some(0) {
        return Err(CliError::Usage("--mesh-every must be at least 1".into()));
    }
    let dataset = DatasetSource::open(&a.dataset)?;
    let mut map = BlockMap::new(cfg.voxel_size, cfg.truncation_factor, cfg.layout())?;
    let mesh_cfg = MeshConfig::default();
    let mut stats = Vec::with_capacity(dataset.len());
    let mut meshing = Vec::new();
    for i in 0..dataset.len() {
        let frame = dataset.frame(i)?;
        let s = integrate(&mut map, &frame, &cfg)?;
        log::info!("frame {i}: {} updates, {} new blocks, {:.2} ms", s.updates, s.blocks_allocated, ms(s.total()));
        stats.push(s);
        if a.mesh_every.is_some_and(|n| (i + 1) % n == 0) {
            let start = Instant::now();
            mesh_volume(&map, &mesh_cfg)?;
            meshing.push(start.elapsed());
        }
    }
    if dataset.is_empty() {
        log::warn!("dataset has no frames; writing an empty volume");
    }
    let mut out = create(&a.out)?;
    write_snapshot(&map, &mut out)?;
    out.flush()?;

    let arrays = map.voxel_array_stats();
    let mut text = format!(
        "mode={}\nvoxel_size={}\nblocks={}\nmean_arrays_per_block={:.4}\nupdates={}\n",
        cfg.preset().map_or_else(|| "custom".to_string(), |p| p.to_string()),
        cfg.voxel_size,
        arrays.block_count,
        arrays.mean_arrays_per_block,
        stats.iter().map(|s| s.updates).sum::<usize>()
    );
    if !stats.is_empty() {
        text.push_str(&timing_report(&stats, &meshing)?.to_text());
    } else {
        text.push_str("frames=0\n");
    }
    print!("{text}");
    Ok(())
}

fn open_volume(path: &Path) -> Result<BlockMap, CliError> {
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::Input(format!("file not found: {}", path.display())),
        _ => CliError::Input(format!("{}: {e}", path.display())),
    })?;
    Ok(read_snapshot(BufReader::new(file))?)
}

pub fn mesh(a: MeshArgs) -> Result<(), CliError> {
    let map = open_volume(&a.volume)?;
    let format = io::MeshFormat::from_path(&a.out).map_err(|e| CliError::Usage(e.to_string()))?;
    let start = Instant::now();
    let mesh = if a.baseline {
        if map.layout() != Layout::Undirected {
            return Err(CliError::Input(format!(
                "{} is a directional volume; --baseline needs an undirected one",
                a.volume.display()
            )));
        }
        classic_mc(&map)?
    } else {
        let cfg = MeshConfig { regularization_sweeps: a.regularization_sweeps, ..MeshConfig::default() };
        mesh_volume(&map, &cfg)?
    };
    let elapsed = start.elapsed();
    if mesh.is_empty() {
        log::warn!("volume produced an empty mesh");
    }
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    io::export_mesh(&mesh, &a.out, format)?;
    println!("vertices={}\ntriangles={}\nmesh_ms={:.3}", mesh.vertex_count(), mesh.triangle_count(), ms(elapsed));
    Ok(())
}

fn load_reference(scene_arg: &str) -> Result<Reference, CliError> {
    let path = PathBuf::from(scene_arg);
    match path.extension().and_then(|e| e.to_str()) {
        Some("ply") | Some("obj") => Ok(Reference::mesh(&io::load_mesh(&path)?)?),
        _ => Ok(Reference::Analytic(load_scene(scene_arg)?.1.scene)),
    }
}

pub fn eval(a: EvalArgs) -> Result<(), CliError> {
    positive("voxel-size", Some(a.voxel_size))?;
    positive("clamp-max", a.clamp_max)?;
    if let Some(h) = &a.heatmap {
        if io::MeshFormat::from_path(h).ok() != Some(io::MeshFormat::Ply) {
            return Err(CliError::Usage("--heatmap must name a .ply file".into()));
        }
    }
    let mesh = io::load_mesh(&a.mesh)?;
    let reference = load_reference(&a.reference)?;
    let report = mesh_to_reference_distances(&mesh, &reference)?;
    let mut text = String::new();
    let _ = write!(
        text,
        "samples={}\nrmse={}\nmean={}\nmax={}\n",
        report.samples(),
        report.rmse,
        report.mean,
        report.max
    );
    match &a.out {
        Some(path) => {
            let mut out = create(path)?;
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
        None => print!("{text}"),
    }
    if let Some(path) = &a.heatmap {
        let clamp = a.clamp_max.unwrap_or(4.0 * a.voxel_size);
        let mut colored = mesh.clone();
        colored.scalars = Some(heatmap_scalars(&report, clamp)?);
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        io::export_mesh(&colored, path, io::MeshFormat::Ply)?;
    }
    Ok(())
}

const SWEEP_HEADER: [&str; 13] = [
    "scene",
    "mode",
    "voxel_size",
    "status",
    "rmse",
    "mean",
    "max",
    "vertices",
    "triangles",
    "blocks",
    "mean_arrays_per_block",
    "fuse_ms_per_frame",
    "mesh_ms",
];

pub fn sweep(a: SweepArgs) -> Result<(), CliError> {
    for &h in &a.voxel_sizes {
        positive("voxel-sizes", Some(h))?;
    }
    positive("trunc-factor", a.trunc_factor)?;
    if a.frames == Some(0) {
        return Err(CliError::Usage("--frames must be at least 1".into()));
    }
    let sink: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut csv = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| CliError::Runtime(e.to_string());
    csv.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for scene_arg in &a.scenes {
        let scene = load_scene(scene_arg).and_then(|(label, mut file)| {
            if let Some(n) = a.frames {
                file.trajectory.frames = n;
            }
            file.validate()?;
            Ok((label, file))
        });
        let (label, file, frames) = match scene {
            Ok((label, file)) => {
                let frames = render_frames(&file);
                (label, Ok(file), frames)
            }
            Err(e) => (scene_arg.clone(), Err(e.to_string()), Vec::new()),
        };
        for &mode in &a.modes {
            for &h in &a.voxel_sizes {
                let mut row = vec![label.clone(), mode.to_string(), h.to_string()];
                let outcome = match &file {
                    Err(e) => Err(e.clone()),
                    Ok(file) => {
                        let mut cfg = FusionConfig::from_preset(mode, h);
                        if let Some(t) = a.trunc_factor {
                            cfg.truncation_factor = t;
                        }
                        run_frames(file, &frames, &cfg, &MeshConfig::default()).map_err(|e| e.to_string())
                    }
                };
                match outcome {
                    Ok(out) => {
                        let d = out.distances.as_ref();
                        let f = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:.9}"));
                        let arrays = out.volume.voxel_array_stats();
                        let fuse = out.fusion.iter().map(|s| ms(s.total())).sum::<f64>() / out.fusion.len().max(1) as f64;
                        row.extend([
                            if d.is_some() { "ok".to_string() } else { "empty mesh".to_string() },
                            f(d.map(|d| d.rmse)),
                            f(d.map(|d| d.mean)),
                            f(d.map(|d| d.max)),
                            out.mesh.vertex_count().to_string(),
                            out.mesh.triangle_count().to_string(),
                            arrays.block_count.to_string(),
                            format!("{:.6}", arrays.mean_arrays_per_block),
                            format!("{fuse:.3}"),
                            format!("{:.3}", ms(out.meshing)),
                        ]);
                    }
                    Err(msg) => {
                        log::error!("{label} {mode} {h}: {msg}");
                        row.push(format!("error: {msg}"));
                        row.extend(std::iter::repeat_n(String::new(), SWEEP_HEADER.len() - 4));
                    }
                }
                csv.write_record(&row).map_err(csv_err)?;
            }
        }
    }
    csv.flush()?;
    Ok(())
}
