//! Plane preprocessing: block-median filtering, mean downsampling, and
//! min/max stretching onto an integer histogram axis.
//!
//! The hue plane is reduced with [`block_median`] (the median of each
//! non-overlapping `d x d` block becomes the downsampled pixel in one fused
//! pass), which suppresses the juxtaposition artifacts gray-ish pixels cause
//! in hue. Saturation and intensity go through [`downsample_mean`].

use thiserror::Error;

use crate::raster::Plane;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("downsample factor must be one of 1, 2, 4, 8, got {0}")]
    InvalidDownsample(usize),
    #[error("stretch level count must be at least 2, got {0}")]
    InvalidLevels(usize),
    #[error("block size {d} exceeds plane dimensions {width}x{height}")]
    BlockExceedsPlane { d: usize, width: usize, height: usize },
    #[error("bin {bin} outside the {levels}-level axis")]
    BinOutOfRange { bin: u16, levels: usize },
}

/// Downsample factor and stretched-axis bin count used by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessConfig {
    downsample: usize,
    stretch_levels: usize,
}

impl PreprocessConfig {
    pub fn new(downsample: usize, stretch_levels: usize) -> Result<Self, PreprocessError> {
        if !matches!(downsample, 1 | 2 | 4 | 8) {
            return Err(PreprocessError::InvalidDownsample(downsample));
        }
        if stretch_levels < 2 {
            return Err(PreprocessError::InvalidLevels(stretch_levels));
        }
        Ok(Self {
            downsample,
            stretch_levels,
        })
    }

    pub fn downsample(&self) -> usize {
        self.downsample
    }

    pub fn stretch_levels(&self) -> usize {
        self.stretch_levels
    }
}

impl Default for PreprocessConfig {
    /// Field configuration: downsample 4, 256 stretched units.
    fn default() -> Self {
        Self {
            downsample: 4,
            stretch_levels: 256,
        }
    }
}

/// A plane quantized to integer bins in `[0, levels-1]` by min/max
/// stretching. The source extremes are kept for traceability.
#[derive(Debug, Clone, PartialEq)]
pub struct StretchedPlane {
    width: usize,
    height: usize,
    levels: usize,
    bins: Vec<u16>,
    source_min: f64,
    source_max: f64,
}

impl StretchedPlane {
    /// Builds a stretched plane directly from bin values (for synthetic
    /// inputs); source extremes are recorded as the bin range.
    pub fn from_bins(
        width: usize,
        height: usize,
        levels: usize,
        bins: Vec<u16>,
    ) -> Result<Self, PreprocessError> {
        if levels < 2 {
            return Err(PreprocessError::InvalidLevels(levels));
        }
        if let Some(&bad) = bins.iter().find(|&&b| b as usize >= levels) {
            return Err(PreprocessError::BinOutOfRange {
                bin: bad,
                levels,
            });
        }
        assert_eq!(bins.len(), width * height);
        Ok(Self {
            width,
            height,
            levels,
            bins,
            source_min: 0.0,
            source_max: (levels - 1) as f64,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn bin(&self, x: usize, y: usize) -> u16 {
        self.bins[y * self.width + x]
    }

    pub fn bins(&self) -> &[u16] {
        &self.bins
    }

    pub fn source_min(&self) -> f64 {
        self.source_min
    }

    pub fn source_max(&self) -> f64 {
        self.source_max
    }
}

fn check_block(plane: &Plane, d: usize) -> Result<(usize, usize), PreprocessError> {
    if d == 0 || d > plane.width() || d > plane.height() {
        return Err(PreprocessError::BlockExceedsPlane {
            d,
            width: plane.width(),
            height: plane.height(),
        });
    }
    Ok((plane.width() / d, plane.height() / d))
}

/// Fused median filter + downsample: each output pixel is the median of its
/// `d x d` source block (mean of the two middle values when the count is
/// even). Trailing rows/columns that do not fill a block are dropped.
pub fn block_median(plane: &Plane, d: usize) -> Result<Plane, PreprocessError> {
    let (out_w, out_h) = check_block(plane, d)?;
    let mut block = vec![0.0; d * d];
    let values = reduce_blocks(plane, d, out_w, out_h, |src| {
        block.copy_from_slice(src);
        block.sort_unstable_by(f64::total_cmp);
        let mid = block.len() / 2;
        if block.len() % 2 == 1 {
            block[mid]
        } else {
            (block[mid - 1] + block[mid]) / 2.0
        }
    });
    Ok(Plane::new(out_w, out_h, plane.kind(), values).expect("median stays in range"))
}

/// Downsample by the mean of each non-overlapping `d x d` block.
pub fn downsample_mean(plane: &Plane, d: usize) -> Result<Plane, PreprocessError> {
    let (out_w, out_h) = check_block(plane, d)?;
    let values = reduce_blocks(plane, d, out_w, out_h, |src| {
        src.iter().sum::<f64>() / src.len() as f64
    });
    Ok(Plane::new(out_w, out_h, plane.kind(), values).expect("mean stays in range"))
}

fn reduce_blocks(
    plane: &Plane,
    d: usize,
    out_w: usize,
    out_h: usize,
    mut reduce: impl FnMut(&[f64]) -> f64,
) -> Vec<f64> {
    let mut out = Vec::with_capacity(out_w * out_h);
    let mut gathered = vec![0.0; d * d];
    for by in 0..out_h {
        for bx in 0..out_w {
            for dy in 0..d {
                let src_y = by * d + dy;
                for dx in 0..d {
                    gathered[dy * d + dx] = plane.get(bx * d + dx, src_y);
                }
            }
            out.push(reduce(&gathered));
        }
    }
    out
}

/// Stretches a plane onto the integer axis `[0, levels-1]` as
/// `bin = round((v - min) / (max - min) * (levels - 1))` with round-half-up.
/// A constant plane maps entirely to bin 0.
pub fn minmax_stretch(plane: &Plane, levels: usize) -> StretchedPlane {
    assert!(levels >= 2, "stretch needs at least two levels");
    assert!(levels <= u16::MAX as usize + 1, "bin index must fit in u16");
    let (min, max) = plane.min_max();
    let range = max - min;
    let scale = (levels - 1) as f64;
    let bins = plane
        .values()
        .iter()
        .map(|&v| {
            if range > 0.0 {
                ((v - min) / range * scale + 0.5).floor() as u16
            } else {
                0
            }
        })
        .collect();
    StretchedPlane {
        width: plane.width(),
        height: plane.height(),
        levels,
        bins,
        source_min: min,
        source_max: max,
    }
}
