//! `outcrop` — survey a scene image the way the tripod rig did in the
//! field: mosaic, segment, find the most uncommon spots, and re-shoot them
//! at full resolution.
//!
//! Exit codes: 0 success, 1 validation failure, 2 I/O failure.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use config::{parse_grid, parse_offset, Overrides};
use outcrop_core::{run_pipeline, RunConfig, RunReport};

#[derive(Debug, Parser)]
#[command(
    name = "outcrop",
    about = "Mosaic a scene with a simulated pan-tilt camera, segment it, and re-point at the most interesting spots",
    after_help = "Config file keys mirror the long flag names (`key = value`, `#` comments).\n\
                  Flags override file values, which override defaults."
)]
struct Cli {
    /// Scene raster to survey (PPM/PGM/PNG)
    #[arg(long)]
    scene: Option<PathBuf>,

    /// Mosaic grid as MxN (pan columns x tilt rows)
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,

    /// Downsample factor (1, 2, 4 or 8)
    #[arg(long)]
    downsample: Option<usize>,

    /// Stretched-axis bin count
    #[arg(long)]
    levels: Option<usize>,

    /// Peak disk radius for the hue plane, in stretched units
    #[arg(long = "w-hue")]
    w_hue: Option<f64>,

    /// Peak disk radius for the saturation plane
    #[arg(long = "w-sat")]
    w_sat: Option<f64>,

    /// Peak disk radius for the intensity plane
    #[arg(long = "w-int")]
    w_int: Option<f64>,

    /// Co-occurrence pair offset as DX,DY
    #[arg(long, value_parser = parse_offset)]
    offset: Option<outcrop_core::segment::PairOffset>,

    /// Gaussian blur width (sigma) for the interest map
    #[arg(long)]
    blur: Option<f64>,

    /// Number of interest points to re-acquire
    #[arg(long = "top-k")]
    top_k: Option<usize>,

    /// Non-max suppression radius in mosaic pixels
    #[arg(long)]
    suppress: Option<usize>,

    /// Subimage field of view as WxH (default: scene tiled by the grid)
    #[arg(long, value_parser = parse_grid)]
    fov: Option<(usize, usize)>,

    /// Pan/tilt step in scene pixels as XxY (default: the fov)
    #[arg(long, value_parser = parse_grid)]
    step: Option<(usize, usize)>,

    /// Output directory for maps, chips and report.json
    #[arg(long)]
    out: Option<PathBuf>,

    /// Config file with `key = value` lines
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            scene: self.scene.clone(),
            grid: self.grid,
            downsample: self.downsample,
            levels: self.levels,
            w_hue: self.w_hue,
            w_sat: self.w_sat,
            w_int: self.w_int,
            offset: self.offset,
            blur: self.blur,
            top_k: self.top_k,
            suppress: self.suppress,
            fov: self.fov,
            step: self.step,
            out: self.out.clone(),
        }
    }
}

fn print_summary(report: &RunReport) {
    println!(
        "mosaic {}x{} ({}x{} grid of {}x{} tiles, downsample {})",
        report.mosaic_width,
        report.mosaic_height,
        report.grid_cols,
        report.grid_rows,
        report.tile_width,
        report.tile_height,
        report.downsample,
    );
    for plane in &report.planes {
        println!(
            "{:>10}: {} peaks, {} segments (w = {})",
            plane.plane,
            plane.peaks.len(),
            plane.segments.len(),
            plane.radius
        );
    }
    if report.interest_points.is_empty() {
        println!("no interest points (scene has no dominant uncommon region)");
    } else {
        println!("interest points:");
        for p in &report.interest_points {
            println!(
                "  {}. mosaic ({}, {})  scene ({}, {})  score {:.3}",
                p.rank, p.x, p.y, p.scene_x, p.scene_y, p.score
            );
        }
    }
    let timings: Vec<String> = report
        .timings
        .iter()
        .map(|t| format!("{} {:.1}ms", t.stage, t.duration.as_secs_f64() * 1e3))
        .collect();
    println!("stages: {}", timings.join(", "));
}

fn run() -> Result<(), (i32, String)> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err((1, e.to_string())),
    };

    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| (2, format!("config: cannot read {}: {e}", path.display())))?;
        let file_overrides =
            Overrides::from_file(&text).map_err(|e| (1, format!("config: {e}")))?;
        file_overrides.apply(&mut cfg);
    }
    cli.overrides().apply(&mut cfg);

    let report = run_pipeline(&cfg).map_err(|e| (e.exit_code(), e.to_string()))?;
    print_summary(&report);
    println!("artifacts written to {}", cfg.out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code as u8)
        }
    }
}
