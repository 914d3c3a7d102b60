//! Stage orchestration for the relief CLI: image -> luminance ->
//! pyramid -> height field -> mesh -> STL (+ optional SVG layers).
//!
//! Progress goes to stderr; only artifacts touch the filesystem and only
//! the slice summary goes to stdout, so the tool stays scriptable.

use relief_core::heightmap::{self, HeightField};
use relief_core::luminance::{load_pnm, stats};
use relief_core::mesh::{heightfield_to_mesh, validate};
use relief_core::slicer::{layer_to_svg, slice_all};
use relief_core::stl::{write_stl_ascii, write_stl_binary};
use relief_core::wavelet::{pyramid_smooth, Kernel};
use relief_core::Matrix;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Usage = 1,
    InputParse = 2,
    Config = 3,
    Geometry = 4,
    Io = 5,
}

#[derive(Debug)]
pub enum PipelineError {
    Parse(String),
    Config(String),
    Geometry(String),
    Io(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            PipelineError::Parse(_) => ExitCode::InputParse,
            PipelineError::Config(_) => ExitCode::Config,
            PipelineError::Geometry(_) => ExitCode::Geometry,
            PipelineError::Io(_) => ExitCode::Io,
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Parse(m) => write!(f, "input parse: {m}"),
            PipelineError::Config(m) => write!(f, "config: {m}"),
            PipelineError::Geometry(m) => write!(f, "geometry: {m}"),
            PipelineError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub kernel: Kernel,
    pub rounds: u32,
    pub zmin: f64,
    pub zmax: f64,
    pub base: f64,
    pub invert: bool,
    /// Two-level mode: (cut, low_h, high_h). Replaces the zmin/zmax mapping.
    pub threshold: Option<(f64, f64, f64)>,
    pub sx: f64,
    pub sy: f64,
    pub binary_stl: bool,
    pub slice_dz: Option<f64>,
}

fn check_config(config: &PipelineConfig) -> Result<(), PipelineError> {
    if config.threshold.is_none() && config.zmax <= config.zmin {
        return Err(PipelineError::Config(format!(
            "zmax ({}) must exceed zmin ({})",
            config.zmax, config.zmin
        )));
    }
    if let Some((cut, low, high)) = config.threshold {
        if !(cut > 0.0 && cut < 1.0) {
            return Err(PipelineError::Config(format!(
                "threshold cut must lie in (0, 1), got {cut}"
            )));
        }
        if low < 0.0 || high < 0.0 {
            return Err(PipelineError::Config(format!(
                "threshold heights must be >= 0, got {low} and {high}"
            )));
        }
    }
    if !(config.sx > 0.0 && config.sy > 0.0) {
        return Err(PipelineError::Config(format!(
            "axis scales must be positive, got sx {} sy {}",
            config.sx, config.sy
        )));
    }
    if config.base < 0.0 {
        return Err(PipelineError::Config(format!(
            "base must be >= 0, got {}",
            config.base
        )));
    }
    if let Some(dz) = config.slice_dz {
        if !(dz > 0.0) {
            return Err(PipelineError::Config(format!(
                "slice-dz must be positive, got {dz}"
            )));
        }
    }
    Ok(())
}

pub fn run(config: &PipelineConfig) -> Result<(), PipelineError> {
    check_config(config)?;

    let bytes = std::fs::read(&config.input)
        .map_err(|e| PipelineError::Io(format!("{}: {e}", config.input.display())))?;
    let gray = load_pnm(&bytes)
        .map_err(|e| PipelineError::Parse(e.to_string()))?
        .into_gray();
    if let Ok(s) = stats(&gray) {
        eprintln!(
            "loaded {}x{} (min {:.4}, max {:.4}, mean {:.4})",
            gray.width, gray.height, s.min, s.max, s.mean
        );
    }

    // One pyramid round at a time so each intermediate size is reported.
    let mut matrix = heightmap::pad_to_even(&gray.to_matrix(), config.rounds);
    for round in 1..=config.rounds {
        matrix = pyramid_smooth(&matrix, 1, config.kernel)
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        eprintln!("round {round}: {}x{}", matrix.rows(), matrix.cols());
    }

    let hf = build_height_field(config, &matrix)?;
    let hf = heightmap::rescale_axes(&hf, config.sx, config.sy)
        .map_err(|e| PipelineError::Config(e.to_string()))?;

    let mesh = heightfield_to_mesh(&hf).map_err(|e| PipelineError::Geometry(e.to_string()))?;
    let report = validate(&mesh);
    if !report.is_watertight() {
        return Err(PipelineError::Geometry(format!(
            "generated mesh is not watertight: {} defects, chi {}",
            report.defect_count(),
            report.euler_characteristic
        )));
    }
    eprintln!(
        "mesh: {} vertices, {} facets, chi {}",
        report.vertex_count, report.facet_count, report.euler_characteristic
    );

    let name = config
        .output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "relief".to_string());
    let stl = if config.binary_stl {
        write_stl_binary(&mesh, "relief heightfield mesh")
    } else {
        write_stl_ascii(&mesh, &name)
    };
    std::fs::write(&config.output, &stl)
        .map_err(|e| PipelineError::Io(format!("{}: {e}", config.output.display())))?;
    eprintln!("wrote {} ({} bytes)", config.output.display(), stl.len());

    if let Some(dz) = config.slice_dz {
        write_layers(config, &mesh, dz, &name)?;
    }
    Ok(())
}

fn build_height_field(
    config: &PipelineConfig,
    matrix: &Matrix,
) -> Result<HeightField, PipelineError> {
    let hf = match config.threshold {
        Some((cut, low, high)) => {
            let leveled = heightmap::threshold_filter(matrix, cut, low, high)
                .map_err(|e| PipelineError::Config(e.to_string()))?;
            HeightField::from_heights(leveled, config.base)
        }
        None => heightmap::gray_to_height(matrix, config.zmin, config.zmax, config.invert)
            .map(|mut hf| {
                hf.base = config.base;
                hf
            }),
    };
    hf.map_err(|e| PipelineError::Config(e.to_string()))
}

fn write_layers(
    config: &PipelineConfig,
    mesh: &relief_core::TriangleMesh,
    dz: f64,
    name: &str,
) -> Result<(), PipelineError> {
    let layers = slice_all(mesh, dz).map_err(|e| PipelineError::Geometry(e.to_string()))?;
    let dir = config
        .output
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut total_length = 0.0;
    for (k, layer) in layers.iter().enumerate() {
        total_length += layer.total_length();
        let path = dir.join(format!("{name}_layer_{k:04}.svg"));
        std::fs::write(&path, layer_to_svg(layer))
            .map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))?;
    }
    println!(
        "layers: {}  total loop length: {:.3} mm",
        layers.len(),
        total_length
    );
    Ok(())
}
