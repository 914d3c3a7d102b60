//! relief: convert a PNM image into a 3D-printable relief STL.
//!
//! Pipeline: load PNM -> luminance -> wavelet pyramid smoothing ->
//! height field -> watertight mesh -> STL, with optional per-layer SVG
//! slicing. Exit codes: 0 success, 1 usage, 2 input parse, 3 config,
//! 4 geometry, 5 I/O.

mod pipeline;

use clap::error::ErrorKind;
use clap::Parser;
use pipeline::{run, ExitCode, PipelineConfig};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum KernelArg {
    Haar,
    D4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum FormatArg {
    Ascii,
    Binary,
}

/// Convert a PNM image (P2/P3/P5/P6) into a 3D-printable relief STL.
#[derive(Debug, Parser)]
#[command(name = "relief", version, disable_help_subcommand = true)]
struct Cli {
    /// Input image (PNM: P2, P3, P5, or P6)
    #[arg(long)]
    input: PathBuf,

    /// Output STL path
    #[arg(long)]
    output: PathBuf,

    /// Smoothing kernel
    #[arg(long, value_enum, default_value_t = KernelArg::Haar)]
    kernel: KernelArg,

    /// Number of pyramid smoothing rounds (each halves both dimensions)
    #[arg(long, default_value_t = 2)]
    rounds: u32,

    /// Height assigned to luminance 0, in mm
    #[arg(long, default_value_t = 2.0)]
    zmin: f64,

    /// Height assigned to luminance 1, in mm
    #[arg(long, default_value_t = 10.0)]
    zmax: f64,

    /// Base-plate thickness in mm
    #[arg(long, default_value_t = 0.5)]
    base: f64,

    /// Map darker pixels to taller relief instead of brighter ones
    #[arg(long, conflicts_with = "threshold")]
    invert: bool,

    /// Two-level mode: CUT LOW HIGH (luminance cut in (0,1), heights in mm).
    /// Mutually exclusive with the continuous zmin/zmax mapping.
    #[arg(
        long,
        num_args = 3,
        value_names = ["CUT", "LOW", "HIGH"],
        conflicts_with_all = ["zmin", "zmax"]
    )]
    threshold: Option<Vec<f64>>,

    /// X grid-spacing scale factor
    #[arg(long, default_value_t = 1.0)]
    sx: f64,

    /// Y grid-spacing scale factor
    #[arg(long, default_value_t = 1.0)]
    sy: f64,

    /// STL flavor
    #[arg(long, value_enum, default_value_t = FormatArg::Binary)]
    format: FormatArg,

    /// Also slice the mesh at this layer thickness (mm), writing one SVG
    /// per layer next to the STL plus a summary
    #[arg(long)]
    slice_dz: Option<f64>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => ExitCode::Usage as i32,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };

    let config = PipelineConfig {
        input: cli.input,
        output: cli.output,
        kernel: match cli.kernel {
            KernelArg::Haar => relief_core::Kernel::Haar,
            KernelArg::D4 => relief_core::Kernel::D4,
        },
        rounds: cli.rounds,
        zmin: cli.zmin,
        zmax: cli.zmax,
        base: cli.base,
        invert: cli.invert,
        threshold: cli.threshold.map(|t| (t[0], t[1], t[2])),
        sx: cli.sx,
        sy: cli.sy,
        binary_stl: cli.format == FormatArg::Binary,
        slice_dz: cli.slice_dz,
    };

    match run(&config) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code() as i32);
        }
    }
}
