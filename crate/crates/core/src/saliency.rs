//! Uncommon maps, the fused interest map, and interest-point extraction.
//!
//! Segments are ranked by pixel area and reversed: the largest segment gets
//! uncommonness 1, the smallest gets the highest value, so rarity scores
//! high. Unsegmented pixels contribute nothing. The three per-plane uncommon
//! maps are summed (unweighted) into an interest map that is Gaussian-blurred
//! so clusters of uncommon pixels outweigh isolated rare pixels, and the
//! blurred map's dominant local maxima become the camera's re-pointing
//! targets.

use thiserror::Error;

use crate::raster::Plane;
use crate::segment::{SegmentationMap, MAX_PEAKS};

#[derive(Debug, Error)]
pub enum SaliencyError {
    #[error("map dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("interest scores must be non-negative, got {0}")]
    NegativeScore(f64),
    #[error("invalid saliency config: {0}")]
    InvalidConfig(String),
}

/// Per-pixel uncommonness: 0 for unsegmented pixels, otherwise the segment's
/// reversed area rank (1 = most common).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncommonMap {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl UncommonMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.values[y * self.width + x]
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// 8-bit grayscale scaled by the map maximum (whiter = more uncommon).
    pub fn to_gray8(&self) -> Vec<u8> {
        let max = self.values.iter().copied().max().unwrap_or(0);
        if max == 0 {
            return vec![0; self.values.len()];
        }
        self.values
            .iter()
            .map(|&v| ((v as f64 / max as f64) * 255.0).round() as u8)
            .collect()
    }
}

/// Ranks the nonempty segments by pixel count (ties: lower label first) and
/// assigns the reversed rank as uncommonness; label 0 stays 0.
pub fn uncommon_map(seg: &SegmentationMap) -> UncommonMap {
    let areas = seg.area_by_label();
    let mut order: Vec<u8> = (1..=MAX_PEAKS as u8)
        .filter(|&l| areas[l as usize] > 0)
        .collect();
    order.sort_by(|&a, &b| areas[b as usize]
        .cmp(&areas[a as usize])
        .then(a.cmp(&b)));
    let mut rank_of_label = [0u8; MAX_PEAKS + 1];
    for (pos, &label) in order.iter().enumerate() {
        rank_of_label[label as usize] = pos as u8 + 1;
    }
    UncommonMap {
        width: seg.width(),
        height: seg.height(),
        values: seg
            .labels()
            .iter()
            .map(|&l| rank_of_label[l as usize])
            .collect(),
    }
}

/// Per-pixel interest scores over the mosaic.
#[derive(Debug, Clone, PartialEq)]
pub struct InterestMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
    blurred: bool,
}

impl InterestMap {
    /// Builds an (unblurred) interest map from raw non-negative scores.
    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Result<Self, SaliencyError> {
        assert_eq!(values.len(), width * height);
        if let Some(&bad) = values.iter().find(|&&v| v.is_nan() || v < 0.0) {
            return Err(SaliencyError::NegativeScore(bad));
        }
        Ok(Self {
            width,
            height,
            values,
            blurred: false,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_blurred(&self) -> bool {
        self.blurred
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// 8-bit grayscale scaled by the map maximum.
    pub fn to_gray8(&self) -> Vec<u8> {
        let max = self.max();
        if max <= 0.0 {
            return vec![0; self.values.len()];
        }
        self.values
            .iter()
            .map(|&v| ((v / max) * 255.0).round() as u8)
            .collect()
    }
}

/// Sums the three uncommon maps pixelwise with unit weights.
pub fn fuse_interest(
    u_h: &UncommonMap,
    u_s: &UncommonMap,
    u_i: &UncommonMap,
) -> Result<InterestMap, SaliencyError> {
    for m in [u_s, u_i] {
        if (m.width(), m.height()) != (u_h.width(), u_h.height()) {
            return Err(SaliencyError::DimensionMismatch(
                u_h.width(),
                u_h.height(),
                m.width(),
                m.height(),
            ));
        }
    }
    let values = u_h
        .values()
        .iter()
        .zip(u_s.values())
        .zip(u_i.values())
        .map(|((&a, &b), &c)| f64::from(a) + f64::from(b) + f64::from(c))
        .collect();
    Ok(InterestMap {
        width: u_h.width(),
        height: u_h.height(),
        values,
        blurred: false,
    })
}

/// Reflected (edge-repeating) index for out-of-range taps.
fn reflect(mut i: i64, n: i64) -> usize {
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Separable Gaussian with sigma = `width`, truncated at radius `3 * sigma`
/// and renormalized; borders use reflect padding. Constant maps are fixed
/// points and the global maximum never grows.
pub fn gaussian_blur(map: &InterestMap, width: f64) -> InterestMap {
    assert!(width > 0.0, "blur width must be positive");
    let radius = (3.0 * width).ceil().max(1.0) as usize;
    let mut kernel: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            (-d * d / (2.0 * width * width)).exp()
        })
        .collect();
    let norm: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= norm;
    }

    let (w, h) = (map.width as i64, map.height as i64);
    let mut tmp = vec![0.0; map.values.len()];
    for y in 0..map.height {
        for x in 0..w {
            let mut acc = 0.0;
            for (t, k) in kernel.iter().enumerate() {
                let sx = reflect(x + t as i64 - radius as i64, w);
                acc += k * map.values[y * map.width + sx];
            }
            tmp[y * map.width + x as usize] = acc;
        }
    }
    let mut out = vec![0.0; map.values.len()];
    for y in 0..h {
        for x in 0..map.width {
            let mut acc = 0.0;
            for (t, k) in kernel.iter().enumerate() {
                let sy = reflect(y + t as i64 - radius as i64, h);
                acc += k * tmp[sy * map.width + x];
            }
            out[y as usize * map.width + x] = acc;
        }
    }
    InterestMap {
        width: map.width,
        height: map.height,
        values: out,
        blurred: true,
    }
}

/// A re-pointing target: mosaic coordinates, blurred interest score, and
/// rank (1 = most interesting, drawn green; 2 blue; 3 red).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterestPoint {
    pub x: usize,
    pub y: usize,
    pub score: f64,
    pub rank: usize,
}

/// Blur width, point count and suppression radius for interest extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaliencyConfig {
    /// Gaussian sigma in mosaic pixels.
    pub blur_width: f64,
    /// Number of interest points to extract.
    pub top_k: usize,
    /// Non-max suppression disk radius; derived from the mosaic size when
    /// absent.
    pub suppression_radius: Option<usize>,
}

impl Default for SaliencyConfig {
    fn default() -> Self {
        Self {
            blur_width: 10.0,
            top_k: 3,
            suppression_radius: None,
        }
    }
}

impl SaliencyConfig {
    pub fn validate(&self) -> Result<(), SaliencyError> {
        if !self.blur_width.is_finite() || self.blur_width <= 0.0 {
            return Err(SaliencyError::InvalidConfig(format!(
                "blur width must be positive, got {}",
                self.blur_width
            )));
        }
        if self.top_k == 0 {
            return Err(SaliencyError::InvalidConfig("top-k must be at least 1".into()));
        }
        if self.suppression_radius == Some(0) {
            return Err(SaliencyError::InvalidConfig(
                "suppression radius must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Suppression radius for a given mosaic: the configured value, or
    /// one-eighth of the smaller dimension (rounded up, at least 1).
    pub fn effective_suppression(&self, width: usize, height: usize) -> usize {
        self.suppression_radius
            .unwrap_or_else(|| width.min(height).div_ceil(8))
            .max(1)
    }
}

/// True when `(x, y)` is a strict local maximum of its 8-neighborhood.
/// Plateau pixels (any equal neighbor) fail, which is what makes a constant
/// map — or a uniform scene whose blurred interest is flat over the
/// segmented area — yield no points at all.
fn is_strict_local_max(map: &InterestMap, x: usize, y: usize) -> bool {
    let v = map.get(x, y);
    let mut has_neighbor = false;
    for dy in -1i64..=1 {
        for dx in -1i64..=1 {
            if dx == 0 && dy == 0 {
                continue;
            }
            let nx = x as i64 + dx;
            let ny = y as i64 + dy;
            if nx < 0 || ny < 0 || nx >= map.width as i64 || ny >= map.height as i64 {
                continue;
            }
            has_neighbor = true;
            if map.get(nx as usize, ny as usize) >= v {
                return false;
            }
        }
    }
    has_neighbor
}

/// Greedy interest-point extraction on a blurred map: repeatedly take the
/// highest remaining peak (ties: smallest y, then x) and suppress a disk of
/// radius `r_s` around it, up to `k` points.
///
/// Only strict local maxima qualify as peaks, so a constant map yields no
/// points and a single blurred bump yields exactly one — suppression-ring
/// leftovers and flat plateaus are never picked.
pub fn top_interest_points(map: &InterestMap, k: usize, r_s: usize) -> Vec<InterestPoint> {
    assert!(r_s >= 1, "suppression radius must be at least 1");
    let mut candidates: Vec<(usize, usize, f64)> = Vec::new();
    for y in 0..map.height {
        for x in 0..map.width {
            if is_strict_local_max(map, x, y) {
                candidates.push((x, y, map.get(x, y)));
            }
        }
    }
    let mut taken = vec![false; candidates.len()];
    let mut points = Vec::new();
    for rank in 1..=k {
        let mut best: Option<usize> = None;
        for (i, &(_, _, v)) in candidates.iter().enumerate() {
            if !taken[i] && best.is_none_or(|b: usize| v > candidates[b].2) {
                best = Some(i);
            }
        }
        let Some(chosen) = best else { break };
        let (x, y, score) = candidates[chosen];
        points.push(InterestPoint { x, y, score, rank });
        let r_sq = (r_s * r_s) as i64;
        for (i, &(cx, cy, _)) in candidates.iter().enumerate() {
            let dx = cx as i64 - x as i64;
            let dy = cy as i64 - y as i64;
            if dx * dx + dy * dy <= r_sq {
                taken[i] = true;
            }
        }
    }
    points
}

/// Box colors for annotated mosaics: rank 1 green, 2 blue, 3 red; deeper
/// ranks render white.
pub fn rank_color(rank: usize) -> [u8; 3] {
    match rank {
        1 => [0, 255, 0],
        2 => [0, 0, 255],
        3 => [255, 0, 0],
        _ => [255, 255, 255],
    }
}

/// Renders the intensity mosaic as grayscale RGB and draws a 2-pixel box
/// outline of `box_w x box_h` (one chip footprint) around each interest
/// point, clipped at the mosaic borders. Higher ranks are drawn first so
/// rank 1 stays on top where boxes overlap.
pub fn annotate_mosaic(
    intensity: &Plane,
    points: &[InterestPoint],
    box_w: usize,
    box_h: usize,
) -> Vec<u8> {
    let (w, h) = (intensity.width(), intensity.height());
    let mut rgb = Vec::with_capacity(w * h * 3);
    for &v in intensity.values() {
        let g = (v * 255.0).round().clamp(0.0, 255.0) as u8;
        rgb.extend_from_slice(&[g, g, g]);
    }
    let mut set = |x: i64, y: i64, c: [u8; 3]| {
        if x >= 0 && y >= 0 && x < w as i64 && y < h as i64 {
            let idx = (y as usize * w + x as usize) * 3;
            rgb[idx..idx + 3].copy_from_slice(&c);
        }
    };
    for p in points.iter().rev() {
        let color = rank_color(p.rank);
        let x0 = p.x as i64 - box_w as i64 / 2;
        let y0 = p.y as i64 - box_h as i64 / 2;
        let x1 = x0 + box_w as i64 - 1;
        let y1 = y0 + box_h as i64 - 1;
        for t in 0..2i64 {
            for x in x0..=x1 {
                set(x, y0 + t, color);
                set(x, y1 - t, color);
            }
            for y in y0..=y1 {
                set(x0 + t, y, color);
                set(x1 - t, y, color);
            }
        }
    }
    rgb
}
