//! End-to-end survey driver: load scene, build mosaic, segment the three
//! planes, compute interest, re-point for chips, and write every
//! intermediate artifact plus a JSON report.
//!
//! The run is fully deterministic: identical scene bytes and configuration
//! produce byte-identical output trees. Stage timings are collected on the
//! report struct for display but never serialized, since wall-clock values
//! would break that guarantee.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::netpbm;
use crate::preprocess::{minmax_stretch, PreprocessConfig, StretchedPlane};
use crate::raster::{Plane, RgbImage};
use crate::saliency::{
    annotate_mosaic, fuse_interest, gaussian_blur, top_interest_points, uncommon_map,
    InterestPoint, SaliencyConfig, UncommonMap,
};
use crate::segment::{
    assign_segments, cooccurrence, locate_peaks, rank_peaks, CooccurrenceHistogram, PairOffset,
    RankedPeakSet, SegmentationMap, MAX_PEAKS,
};
use crate::vcam::{acquire_chip, build_mosaic, Mosaic, SceneImage, TileGrid, VcamConfig};

/// Pipeline failure, tagged with the stage that raised it. Validation
/// problems exit with code 1, I/O problems with code 2.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{stage}: {message}")]
    Validation { stage: &'static str, message: String },
    #[error("{stage}: {source}")]
    Io {
        stage: &'static str,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
}

impl PipelineError {
    fn invalid(stage: &'static str, message: impl Into<String>) -> Self {
        Self::Validation {
            stage,
            message: message.into(),
        }
    }

    fn io(stage: &'static str, source: impl std::error::Error + Send + Sync + 'static) -> Self {
        Self::Io {
            stage,
            source: Box::new(source),
        }
    }

    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation { .. } => 1,
            Self::Io { .. } => 2,
        }
    }
}

/// Full run configuration. Fields mirror the CLI flags; `fov` and `step`
/// default to tiling the scene exactly with the requested grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scene: PathBuf,
    pub grid_cols: usize,
    pub grid_rows: usize,
    pub downsample: usize,
    pub levels: usize,
    pub w_hue: f64,
    pub w_sat: f64,
    pub w_int: f64,
    pub offset: PairOffset,
    pub blur_width: f64,
    pub top_k: usize,
    pub suppression: Option<usize>,
    pub fov: Option<(usize, usize)>,
    pub step: Option<(usize, usize)>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    /// Field configuration: downsample 4, 256 stretched units, peak radii
    /// 15/15/20 for H/S/I, horizontal pair offset, blur width 10, top 3.
    fn default() -> Self {
        Self {
            scene: PathBuf::new(),
            grid_cols: 1,
            grid_rows: 1,
            downsample: 4,
            levels: 256,
            w_hue: 15.0,
            w_sat: 15.0,
            w_int: 20.0,
            offset: PairOffset::default(),
            blur_width: 10.0,
            top_k: 3,
            suppression: None,
            fov: None,
            step: None,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    fn saliency(&self) -> SaliencyConfig {
        SaliencyConfig {
            blur_width: self.blur_width,
            top_k: self.top_k,
            suppression_radius: self.suppression,
        }
    }

    /// Checks every field range that does not need the scene on disk.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let stage = "config";
        if self.scene.as_os_str().is_empty() {
            return Err(PipelineError::invalid(stage, "no scene path configured"));
        }
        if self.grid_cols < 1 || self.grid_rows < 1 {
            return Err(PipelineError::invalid(
                stage,
                format!("grid must be at least 1x1, got {}x{}", self.grid_cols, self.grid_rows),
            ));
        }
        PreprocessConfig::new(self.downsample, self.levels)
            .map_err(|e| PipelineError::invalid(stage, e.to_string()))?;
        if self.levels > 4096 {
            return Err(PipelineError::invalid(
                stage,
                format!("stretch levels capped at 4096, got {}", self.levels),
            ));
        }
        for (name, w) in [("w-hue", self.w_hue), ("w-sat", self.w_sat), ("w-int", self.w_int)] {
            if !w.is_finite() || w <= 0.0 {
                return Err(PipelineError::invalid(
                    stage,
                    format!("{name} must be positive, got {w}"),
                ));
            }
        }
        self.saliency()
            .validate()
            .map_err(|e| PipelineError::invalid(stage, e.to_string()))?;
        for (name, dims) in [("fov", self.fov), ("step", self.step)] {
            if let Some((a, b)) = dims {
                if a == 0 || b == 0 {
                    return Err(PipelineError::invalid(
                        stage,
                        format!("{name} components must be positive"),
                    ));
                }
            }
        }
        if self.out_dir.as_os_str().is_empty() {
            return Err(PipelineError::invalid(stage, "no output directory configured"));
        }
        Ok(())
    }
}

/// Peak table row: discovery coordinates plus neighborhood mass and rank.
#[derive(Debug, Clone, Serialize)]
pub struct PeakReport {
    pub rank: usize,
    pub u: usize,
    pub v: usize,
    pub height: u64,
    pub mass: u64,
}

/// Area and uncommonness of one nonempty segment.
#[derive(Debug, Clone, Serialize)]
pub struct SegmentReport {
    pub label: u8,
    pub area: u64,
    pub uncommonness: u8,
}

/// Per-plane results: ranked peaks and segment statistics.
#[derive(Debug, Clone, Serialize)]
pub struct PlaneReport {
    pub plane: &'static str,
    pub radius: f64,
    pub peaks: Vec<PeakReport>,
    pub segments: Vec<SegmentReport>,
}

/// One emitted interest point, in mosaic and scene coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub rank: usize,
    pub x: usize,
    pub y: usize,
    pub scene_x: usize,
    pub scene_y: usize,
    pub score: f64,
}

/// Wall-clock duration of one pipeline stage (display only).
#[derive(Debug, Clone)]
pub struct StageTiming {
    pub stage: &'static str,
    pub duration: Duration,
}

/// Everything numeric a run produced; serialized as `report.json` (without
/// timings) so downstream checks never have to parse images.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scene_width: usize,
    pub scene_height: usize,
    pub grid_cols: usize,
    pub grid_rows: usize,
    pub downsample: usize,
    pub levels: usize,
    pub mosaic_width: usize,
    pub mosaic_height: usize,
    pub tile_width: usize,
    pub tile_height: usize,
    pub suppression_radius: usize,
    pub planes: Vec<PlaneReport>,
    pub interest_points: Vec<PointReport>,
    #[serde(skip)]
    pub timings: Vec<StageTiming>,
}

struct PlaneArtifacts {
    stretched: StretchedPlane,
    hist: CooccurrenceHistogram,
    ranked: RankedPeakSet,
    seg: SegmentationMap,
    uncommon: UncommonMap,
}

fn process_plane(
    plane: &Plane,
    levels: usize,
    radius: f64,
    offset: PairOffset,
    tiles: TileGrid,
) -> PlaneArtifacts {
    let stretched = minmax_stretch(plane, levels);
    let hist = cooccurrence(&stretched, offset, &tiles);
    let peaks = locate_peaks(&hist, MAX_PEAKS, radius);
    let ranked = rank_peaks(&hist, peaks, radius);
    let seg = assign_segments(&stretched, &ranked, offset, &tiles);
    let uncommon = uncommon_map(&seg);
    PlaneArtifacts {
        stretched,
        hist,
        ranked,
        seg,
        uncommon,
    }
}

fn plane_report(name: &'static str, radius: f64, art: &PlaneArtifacts) -> PlaneReport {
    let peaks = art
        .ranked
        .peaks()
        .iter()
        .enumerate()
        .map(|(idx, p)| PeakReport {
            rank: idx + 1,
            u: p.u,
            v: p.v,
            height: p.height,
            mass: p.mass,
        })
        .collect();
    let areas = art.seg.area_by_label();
    let segments = (1..=MAX_PEAKS as u8)
        .filter(|&l| areas[l as usize] > 0)
        .map(|l| {
            let sample = art
                .seg
                .labels()
                .iter()
                .position(|&x| x == l)
                .expect("nonempty segment has a pixel");
            SegmentReport {
                label: l,
                area: areas[l as usize],
                uncommonness: art.uncommon.values()[sample],
            }
        })
        .collect();
    PlaneReport {
        plane: name,
        radius,
        peaks,
        segments,
    }
}

fn load_scene(path: &Path) -> Result<SceneImage, PipelineError> {
    let stage = "scene";
    let is_png = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("png"))
        .unwrap_or(false);
    let image = if is_png {
        let decoded = image::ImageReader::open(path)
            .map_err(|e| PipelineError::io(stage, e))?
            .decode()
            .map_err(|e| PipelineError::io(stage, e))?
            .to_rgb8();
        RgbImage::from_rgb8(
            decoded.width() as usize,
            decoded.height() as usize,
            decoded.as_raw(),
        )
        .map_err(|e| PipelineError::io(stage, e))?
    } else {
        netpbm::load_raster(path).map_err(|e| PipelineError::io(stage, e))?
    };
    Ok(image.into())
}

/// Runs the whole survey and writes the artifact tree:
/// `mosaic_{h,s,i}.pgm`, `hist_{h,s,i}.pgm`, `seg_{h,s,i}.ppm`,
/// `uncommon_{h,s,i}.pgm`, `interest.pgm`, `interest_blurred.pgm`,
/// `annotated.ppm`, `chip_<rank>.ppm` and `report.json`.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunReport, PipelineError> {
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |timings: &mut Vec<StageTiming>, stage: &'static str| {
        let now = Instant::now();
        timings.push(StageTiming {
            stage,
            duration: now - clock,
        });
        clock = now;
    };

    cfg.validate()?;
    lap(&mut timings, "config");

    let scene = load_scene(&cfg.scene)?;
    lap(&mut timings, "scene");

    let (fov_w, fov_h) = cfg.fov.unwrap_or((
        scene.width() / cfg.grid_cols,
        scene.height() / cfg.grid_rows,
    ));
    let (step_x, step_y) = cfg.step.unwrap_or((fov_w, fov_h));
    let vcam = VcamConfig {
        fov_w,
        fov_h,
        step_x,
        step_y,
        cols: cfg.grid_cols,
        rows: cfg.grid_rows,
    };
    let pre = PreprocessConfig::new(cfg.downsample, cfg.levels)
        .expect("validated config");
    let mosaic = build_mosaic(&scene, &vcam, &pre)
        .map_err(|e| PipelineError::invalid("mosaic", e.to_string()))?;
    lap(&mut timings, "mosaic");

    let tiles = mosaic.tile_grid();
    let levels = cfg.levels;
    let offset = cfg.offset;
    let (art_h, art_s, art_i) = std::thread::scope(|s| {
        let h = s.spawn(|| process_plane(&mosaic.planes.h, levels, cfg.w_hue, offset, tiles));
        let sat = s.spawn(|| process_plane(&mosaic.planes.s, levels, cfg.w_sat, offset, tiles));
        let i = process_plane(&mosaic.planes.i, levels, cfg.w_int, offset, tiles);
        (
            h.join().expect("hue worker"),
            sat.join().expect("saturation worker"),
            i,
        )
    });
    lap(&mut timings, "segment");

    let interest = fuse_interest(&art_h.uncommon, &art_s.uncommon, &art_i.uncommon)
        .expect("plane maps share the mosaic dimensions");
    lap(&mut timings, "interest");

    let blurred = gaussian_blur(&interest, cfg.blur_width);
    lap(&mut timings, "blur");

    let saliency = cfg.saliency();
    let r_s = saliency.effective_suppression(mosaic.width(), mosaic.height());
    let points = top_interest_points(&blurred, cfg.top_k, r_s);
    lap(&mut timings, "points");

    let chips: Vec<RgbImage> = points
        .iter()
        .map(|p| acquire_chip(&scene, &mosaic, (p.x, p.y)))
        .collect();
    lap(&mut timings, "chips");

    write_artifacts(cfg, &mosaic, [&art_h, &art_s, &art_i], &interest, &blurred, &points, &chips)?;

    let point_reports = points
        .iter()
        .map(|p| {
            let (scene_x, scene_y) = mosaic.scene_coord(p.x, p.y);
            PointReport {
                rank: p.rank,
                x: p.x,
                y: p.y,
                scene_x,
                scene_y,
                score: p.score,
            }
        })
        .collect();
    let report = RunReport {
        scene_width: scene.width(),
        scene_height: scene.height(),
        grid_cols: cfg.grid_cols,
        grid_rows: cfg.grid_rows,
        downsample: cfg.downsample,
        levels: cfg.levels,
        mosaic_width: mosaic.width(),
        mosaic_height: mosaic.height(),
        tile_width: tiles.tile_w(),
        tile_height: tiles.tile_h(),
        suppression_radius: r_s,
        planes: vec![
            plane_report("hue", cfg.w_hue, &art_h),
            plane_report("saturation", cfg.w_sat, &art_s),
            plane_report("intensity", cfg.w_int, &art_i),
        ],
        interest_points: point_reports,
        timings: Vec::new(),
    };

    let json = serde_json::to_vec_pretty(&report).expect("report serializes");
    let report_path = cfg.out_dir.join("report.json");
    let mut json = json;
    json.push(b'\n');
    fs::write(&report_path, json).map_err(|e| PipelineError::io("write", e))?;

    let mut report = report;
    lap(&mut timings, "write");
    report.timings = timings;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn write_artifacts(
    cfg: &RunConfig,
    mosaic: &Mosaic,
    arts: [&PlaneArtifacts; 3],
    interest: &crate::saliency::InterestMap,
    blurred: &crate::saliency::InterestMap,
    points: &[InterestPoint],
    chips: &[RgbImage],
) -> Result<(), PipelineError> {
    let stage = "write";
    let out = &cfg.out_dir;
    fs::create_dir_all(out).map_err(|e| PipelineError::io(stage, e))?;
    let (w, h) = (mosaic.width(), mosaic.height());
    let io = |e: netpbm::NetpbmError| PipelineError::io(stage, e);

    let planes = [
        ("h", &mosaic.planes.h),
        ("s", &mosaic.planes.s),
        ("i", &mosaic.planes.i),
    ];
    for ((suffix, plane), art) in planes.into_iter().zip(arts) {
        netpbm::write_pgm(out.join(format!("mosaic_{suffix}.pgm")), w, h, &plane.to_gray8())
            .map_err(io)?;
        let levels = art.stretched.levels();
        netpbm::write_pgm(
            out.join(format!("hist_{suffix}.pgm")),
            levels,
            levels,
            &art.hist.to_gray8(),
        )
        .map_err(io)?;
        netpbm::write_ppm(out.join(format!("seg_{suffix}.ppm")), w, h, &art.seg.to_rgb8())
            .map_err(io)?;
        netpbm::write_pgm(
            out.join(format!("uncommon_{suffix}.pgm")),
            w,
            h,
            &art.uncommon.to_gray8(),
        )
        .map_err(io)?;
    }

    netpbm::write_pgm(out.join("interest.pgm"), w, h, &interest.to_gray8()).map_err(io)?;
    netpbm::write_pgm(out.join("interest_blurred.pgm"), w, h, &blurred.to_gray8()).map_err(io)?;

    let tiles = mosaic.tile_grid();
    let annotated = annotate_mosaic(&mosaic.planes.i, points, tiles.tile_w(), tiles.tile_h());
    netpbm::write_ppm(out.join("annotated.ppm"), w, h, &annotated).map_err(io)?;

    for (point, chip) in points.iter().zip(chips) {
        netpbm::save_raster(out.join(format!("chip_{}.ppm", point.rank)), chip).map_err(io)?;
    }
    Ok(())
}
