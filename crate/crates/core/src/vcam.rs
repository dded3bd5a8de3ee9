//! Simulated pan-tilt camera over one large scene raster.
//!
//! Pointing is grid-indexed: pan step `i`, tilt step `j` crops the field of
//! view at `(i * step_x, j * step_y)`. A mosaic is assembled by butting the
//! preprocessed subimages edge to edge with no blending or registration, so
//! a deliberate step/fov mismatch reproduces the visible-seam failure mode
//! of a badly calibrated zoom.

use thiserror::Error;

use crate::preprocess::{block_median, downsample_mean, PreprocessConfig};
use crate::raster::{rgb_to_hsi, HsiPlanes, Plane, PlaneKind, RgbImage};

#[derive(Debug, Error)]
pub enum VcamError {
    #[error("pose (pan {pan}, tilt {tilt}) puts the field of view outside the {width}x{height} scene")]
    PoseOutOfBounds {
        pan: usize,
        tilt: usize,
        width: usize,
        height: usize,
    },
    #[error("{cols}x{rows} grid exceeds the {width}x{height} scene")]
    GridExceedsScene {
        cols: usize,
        rows: usize,
        width: usize,
        height: usize,
    },
    #[error("field of view {fov_w}x{fov_h} smaller than downsample factor {d}")]
    FovSmallerThanBlock { fov_w: usize, fov_h: usize, d: usize },
}

/// The scene raster the virtual camera looks at; read-only and typically much
/// larger than one field of view.
#[derive(Debug, Clone)]
pub struct SceneImage(pub RgbImage);

impl SceneImage {
    pub fn image(&self) -> &RgbImage {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }
}

impl From<RgbImage> for SceneImage {
    fn from(image: RgbImage) -> Self {
        SceneImage(image)
    }
}

/// Grid-indexed camera pointing: pan selects the column, tilt the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CameraPose {
    pub pan_step: usize,
    pub tilt_step: usize,
}

/// Field-of-view size, pan/tilt step sizes in scene pixels, and the mosaic
/// grid shape (`cols` pan columns by `rows` tilt rows).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VcamConfig {
    pub fov_w: usize,
    pub fov_h: usize,
    pub step_x: usize,
    pub step_y: usize,
    pub cols: usize,
    pub rows: usize,
}

impl VcamConfig {
    /// Perfect-butting configuration: step equals the field of view.
    pub fn butting(fov_w: usize, fov_h: usize, cols: usize, rows: usize) -> Self {
        Self {
            fov_w,
            fov_h,
            step_x: fov_w,
            step_y: fov_h,
            cols,
            rows,
        }
    }
}

impl Default for VcamConfig {
    /// One PAL-sized subimage, steps matching the field of view.
    fn default() -> Self {
        Self::butting(360, 288, 1, 1)
    }
}

/// Tile geometry of a mosaic; pixel pairs that straddle a tile edge are
/// excluded from histogramming and segment assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileGrid {
    tile_w: usize,
    tile_h: usize,
}

impl TileGrid {
    pub fn new(tile_w: usize, tile_h: usize) -> Self {
        assert!(tile_w > 0 && tile_h > 0);
        Self { tile_w, tile_h }
    }

    /// A grid with one tile covering the whole plane (no interior edges).
    pub fn single(width: usize, height: usize) -> Self {
        Self::new(width, height)
    }

    pub fn tile_w(&self) -> usize {
        self.tile_w
    }

    pub fn tile_h(&self) -> usize {
        self.tile_h
    }

    pub fn same_tile(&self, ax: usize, ay: usize, bx: usize, by: usize) -> bool {
        ax / self.tile_w == bx / self.tile_w && ay / self.tile_h == by / self.tile_h
    }
}

/// A preprocessed HSI mosaic plus the geometry needed to map mosaic
/// coordinates back onto the scene.
#[derive(Debug, Clone)]
pub struct Mosaic {
    pub planes: HsiPlanes,
    tile_w: usize,
    tile_h: usize,
    downsample: usize,
    cfg: VcamConfig,
}

impl Mosaic {
    pub fn width(&self) -> usize {
        self.planes.width()
    }

    pub fn height(&self) -> usize {
        self.planes.height()
    }

    pub fn tile_grid(&self) -> TileGrid {
        TileGrid::new(self.tile_w, self.tile_h)
    }

    pub fn downsample(&self) -> usize {
        self.downsample
    }

    pub fn cfg(&self) -> &VcamConfig {
        &self.cfg
    }

    /// Scene coordinate of the center of the source block behind mosaic
    /// pixel `(x, y)`.
    pub fn scene_coord(&self, x: usize, y: usize) -> (usize, usize) {
        let (tile_x, tile_y) = (x / self.tile_w, y / self.tile_h);
        let d = self.downsample;
        let sx = tile_x * self.cfg.step_x + (x - tile_x * self.tile_w) * d + d / 2;
        let sy = tile_y * self.cfg.step_y + (y - tile_y * self.tile_h) * d + d / 2;
        (sx, sy)
    }
}

/// Crops one field of view at the pose's grid position.
pub fn acquire_subimage(
    scene: &SceneImage,
    pose: CameraPose,
    cfg: &VcamConfig,
) -> Result<RgbImage, VcamError> {
    let x0 = pose.pan_step * cfg.step_x;
    let y0 = pose.tilt_step * cfg.step_y;
    if x0 + cfg.fov_w > scene.width() || y0 + cfg.fov_h > scene.height() {
        return Err(VcamError::PoseOutOfBounds {
            pan: pose.pan_step,
            tilt: pose.tilt_step,
            width: scene.width(),
            height: scene.height(),
        });
    }
    Ok(scene.image().crop(x0, y0, cfg.fov_w, cfg.fov_h))
}

/// Sweeps the full grid, converting each subimage to HSI and downsampling it
/// (hue by block median, saturation and intensity by block mean), then butts
/// the tiles into one mosaic.
pub fn build_mosaic(
    scene: &SceneImage,
    cfg: &VcamConfig,
    pre: &PreprocessConfig,
) -> Result<Mosaic, VcamError> {
    let d = pre.downsample();
    let tile_w = cfg.fov_w / d;
    let tile_h = cfg.fov_h / d;
    if tile_w == 0 || tile_h == 0 {
        return Err(VcamError::FovSmallerThanBlock {
            fov_w: cfg.fov_w,
            fov_h: cfg.fov_h,
            d,
        });
    }
    let grid_err = || VcamError::GridExceedsScene {
        cols: cfg.cols,
        rows: cfg.rows,
        width: scene.width(),
        height: scene.height(),
    };
    if cfg.cols == 0 || cfg.rows == 0 {
        return Err(grid_err());
    }
    let span_x = (cfg.cols - 1) * cfg.step_x + cfg.fov_w;
    let span_y = (cfg.rows - 1) * cfg.step_y + cfg.fov_h;
    if span_x > scene.width() || span_y > scene.height() {
        return Err(grid_err());
    }

    let mosaic_w = cfg.cols * tile_w;
    let mosaic_h = cfg.rows * tile_h;
    let mut h = vec![0.0; mosaic_w * mosaic_h];
    let mut s = vec![0.0; mosaic_w * mosaic_h];
    let mut i = vec![0.0; mosaic_w * mosaic_h];

    for tile_y in 0..cfg.rows {
        for tile_x in 0..cfg.cols {
            let pose = CameraPose {
                pan_step: tile_x,
                tilt_step: tile_y,
            };
            let sub = acquire_subimage(scene, pose, cfg)?;
            let hsi = rgb_to_hsi(&sub);
            let tiles = [
                block_median(&hsi.h, d).expect("fov checked against block size"),
                downsample_mean(&hsi.s, d).expect("fov checked against block size"),
                downsample_mean(&hsi.i, d).expect("fov checked against block size"),
            ];
            for (dst, tile) in [&mut h, &mut s, &mut i].into_iter().zip(&tiles) {
                blit(dst, mosaic_w, tile, tile_x * tile_w, tile_y * tile_h);
            }
        }
    }

    let planes = HsiPlanes {
        h: Plane::new(mosaic_w, mosaic_h, PlaneKind::Hue, h).expect("hue in range"),
        s: Plane::new(mosaic_w, mosaic_h, PlaneKind::Saturation, s).expect("saturation in range"),
        i: Plane::new(mosaic_w, mosaic_h, PlaneKind::Intensity, i).expect("intensity in range"),
    };
    Ok(Mosaic {
        planes,
        tile_w,
        tile_h,
        downsample: d,
        cfg: *cfg,
    })
}

fn blit(dst: &mut [f64], dst_w: usize, tile: &Plane, x0: usize, y0: usize) {
    for y in 0..tile.height() {
        for x in 0..tile.width() {
            dst[(y0 + y) * dst_w + x0 + x] = tile.get(x, y);
        }
    }
}

/// Re-acquires a full-resolution field of view centered on the scene point
/// behind the given mosaic coordinate, clamped so the chip stays inside the
/// scene. Total: out-of-range coordinates are clamped onto the mosaic first.
pub fn acquire_chip(
    scene: &SceneImage,
    mosaic: &Mosaic,
    mosaic_point: (usize, usize),
) -> RgbImage {
    let cfg = mosaic.cfg();
    let x = mosaic_point.0.min(mosaic.width() - 1);
    let y = mosaic_point.1.min(mosaic.height() - 1);
    let (sx, sy) = mosaic.scene_coord(x, y);
    let left = sx
        .saturating_sub(cfg.fov_w / 2)
        .min(scene.width() - cfg.fov_w);
    let top = sy
        .saturating_sub(cfg.fov_h / 2)
        .min(scene.height() - cfg.fov_h);
    scene.image().crop(left, top, cfg.fov_w, cfg.fov_h)
}
