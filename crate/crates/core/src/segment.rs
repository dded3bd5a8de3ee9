//! Co-occurrence histogramming, peak location and ranking, and peak-disk
//! segment assignment.
//!
//! A 2D histogram counts pairs of stretched values at a fixed pixel offset
//! (horizontal neighbors by default). The eight tallest bins, taken greedily
//! while masking a disk of radius `w` around each find, define the segments;
//! they are then re-ranked by the total pair mass inside their `w`
//! neighborhoods, since a broad moderate peak represents more of the image
//! than a tall spike. A pixel joins segment `s` when its pair point falls in
//! exactly one peak disk; pairs in overlapping disks are conflicts and stay
//! unsegmented.

use thiserror::Error;

use crate::preprocess::StretchedPlane;
use crate::vcam::TileGrid;

/// At most eight peaks are kept; segment labels fit in `1..=8` with 0 for
/// unsegmented pixels.
pub const MAX_PEAKS: usize = 8;

/// Canonical segment rendering palette, indexed by label. Rank 1 (the most
/// common segment) is red, then blue, purple, green, cyan, yellow, white,
/// orange; label 0 (unsegmented) is black.
pub const SEGMENT_PALETTE: [[u8; 3]; 9] = [
    [0, 0, 0],
    [255, 0, 0],
    [0, 0, 255],
    [128, 0, 128],
    [0, 255, 0],
    [0, 255, 255],
    [255, 255, 0],
    [255, 255, 255],
    [255, 165, 0],
];

#[derive(Debug, Error)]
pub enum SegmentError {
    #[error("pair offset must be nonzero")]
    ZeroOffset,
    #[error("segment label {0} outside 0..={MAX_PEAKS}")]
    InvalidLabel(u8),
}

/// Pixel offset between the two ends of a co-occurrence pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairOffset {
    dx: i32,
    dy: i32,
}

impl PairOffset {
    pub fn new(dx: i32, dy: i32) -> Result<Self, SegmentError> {
        if dx == 0 && dy == 0 {
            return Err(SegmentError::ZeroOffset);
        }
        Ok(Self { dx, dy })
    }

    pub fn dx(&self) -> i32 {
        self.dx
    }

    pub fn dy(&self) -> i32 {
        self.dy
    }

    /// The partner coordinate of `(x, y)`, or `None` when it leaves the
    /// plane or crosses a tile edge.
    fn partner(
        &self,
        x: usize,
        y: usize,
        width: usize,
        height: usize,
        tiles: &TileGrid,
    ) -> Option<(usize, usize)> {
        let qx = x as i64 + self.dx as i64;
        let qy = y as i64 + self.dy as i64;
        if qx < 0 || qy < 0 || qx >= width as i64 || qy >= height as i64 {
            return None;
        }
        let (qx, qy) = (qx as usize, qy as usize);
        tiles.same_tile(x, y, qx, qy).then_some((qx, qy))
    }
}

impl Default for PairOffset {
    /// Horizontal neighbors one pixel apart.
    fn default() -> Self {
        Self { dx: 1, dy: 0 }
    }
}

/// 2D count array over `(bin(p), bin(p + offset))` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceHistogram {
    levels: usize,
    counts: Vec<u64>,
}

impl CooccurrenceHistogram {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn get(&self, u: usize, v: usize) -> u64 {
        self.counts[u * self.levels + v]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total pair count (equals the number of eligible pixel pairs).
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Renders the histogram as 8-bit grayscale, scaled by the maximum bin.
    /// Row `u` is the first pair value, column `v` the neighbor's.
    pub fn to_gray8(&self) -> Vec<u8> {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        if max == 0 {
            return vec![0; self.counts.len()];
        }
        self.counts
            .iter()
            .map(|&c| ((c as f64 / max as f64) * 255.0).round() as u8)
            .collect()
    }

    /// Sum of counts over bins within Euclidean distance `w` of `(u, v)`.
    fn disk_mass(&self, u: usize, v: usize, w: f64) -> u64 {
        let r = w.floor() as i64;
        let w_sq = w * w;
        let mut mass = 0;
        for a in (u as i64 - r).max(0)..=(u as i64 + r).min(self.levels as i64 - 1) {
            for b in (v as i64 - r).max(0)..=(v as i64 + r).min(self.levels as i64 - 1) {
                let du = a - u as i64;
                let dv = b - v as i64;
                if (du * du + dv * dv) as f64 <= w_sq {
                    mass += self.counts[a as usize * self.levels + b as usize];
                }
            }
        }
        mass
    }
}

/// Histograms stretched-value pairs at the given offset. Pairs whose second
/// pixel leaves the plane or crosses a tile edge are skipped, so the total
/// equals the eligible pair count exactly.
pub fn cooccurrence(
    plane: &StretchedPlane,
    offset: PairOffset,
    tiles: &TileGrid,
) -> CooccurrenceHistogram {
    let levels = plane.levels();
    let mut counts = vec![0u64; levels * levels];
    for y in 0..plane.height() {
        for x in 0..plane.width() {
            if let Some((qx, qy)) = offset.partner(x, y, plane.width(), plane.height(), tiles) {
                let u = plane.bin(x, y) as usize;
                let v = plane.bin(qx, qy) as usize;
                counts[u * levels + v] += 1;
            }
        }
    }
    CooccurrenceHistogram { levels, counts }
}

/// One histogram peak: bin coordinates, the count found there, and (after
/// [`rank_peaks`]) the pair mass of its `w` neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Peak {
    pub u: usize,
    pub v: usize,
    pub height: u64,
    pub mass: u64,
}

/// Greedily finds up to `max_peaks` histogram maxima. After each find, all
/// bins within Euclidean distance `w` are masked before searching again;
/// the search stops early once the tallest unmasked bin is zero. Ties break
/// toward the smallest `u`, then the smallest `v`.
///
/// The returned peaks carry their own bin count as a provisional mass;
/// [`rank_peaks`] computes the real neighborhood mass.
pub fn locate_peaks(hist: &CooccurrenceHistogram, max_peaks: usize, w: f64) -> Vec<Peak> {
    assert!(w > 0.0, "mask radius must be positive");
    let levels = hist.levels();
    let mut masked = vec![false; levels * levels];
    let mut peaks = Vec::new();
    while peaks.len() < max_peaks {
        let mut best = 0u64;
        let mut best_at = None;
        for u in 0..levels {
            for v in 0..levels {
                let idx = u * levels + v;
                if !masked[idx] && hist.counts[idx] > best {
                    best = hist.counts[idx];
                    best_at = Some((u, v));
                }
            }
        }
        let Some((u, v)) = best_at else { break };
        peaks.push(Peak {
            u,
            v,
            height: best,
            mass: best,
        });
        let r = w.floor() as i64;
        let w_sq = w * w;
        for a in (u as i64 - r).max(0)..=(u as i64 + r).min(levels as i64 - 1) {
            for b in (v as i64 - r).max(0)..=(v as i64 + r).min(levels as i64 - 1) {
                let du = a - u as i64;
                let dv = b - v as i64;
                if (du * du + dv * dv) as f64 <= w_sq {
                    masked[a as usize * levels + b as usize] = true;
                }
            }
        }
    }
    peaks
}

/// Peaks ordered by neighborhood pair mass; the order defines segment
/// identities (rank 1 = largest mass = most common).
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPeakSet {
    peaks: Vec<Peak>,
    radius: f64,
}

impl RankedPeakSet {
    pub fn peaks(&self) -> &[Peak] {
        &self.peaks
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    /// Label lookup table over all `(u, v)` bin pairs: the peak's rank when
    /// the pair point lies in exactly one disk, 0 for none or several.
    fn label_lut(&self, levels: usize) -> Vec<u8> {
        const CONFLICT: u8 = u8::MAX;
        let mut lut = vec![0u8; levels * levels];
        let r = self.radius.floor() as i64;
        let w_sq = self.radius * self.radius;
        for (idx, peak) in self.peaks.iter().enumerate() {
            let label = (idx + 1) as u8;
            for a in (peak.u as i64 - r).max(0)..=(peak.u as i64 + r).min(levels as i64 - 1) {
                for b in (peak.v as i64 - r).max(0)..=(peak.v as i64 + r).min(levels as i64 - 1) {
                    let du = a - peak.u as i64;
                    let dv = b - peak.v as i64;
                    if (du * du + dv * dv) as f64 <= w_sq {
                        let cell = &mut lut[a as usize * levels + b as usize];
                        *cell = if *cell == 0 { label } else { CONFLICT };
                    }
                }
            }
        }
        for cell in &mut lut {
            if *cell == CONFLICT {
                *cell = 0;
            }
        }
        lut
    }
}

/// Re-ranks located peaks by the pair mass within their `w` neighborhoods
/// (non-increasing; overlapping neighborhoods double-count shared bins).
/// Equal masses keep discovery order.
pub fn rank_peaks(hist: &CooccurrenceHistogram, peaks: Vec<Peak>, w: f64) -> RankedPeakSet {
    assert!(peaks.len() <= MAX_PEAKS, "segment labels must fit in 1..=8");
    let mut peaks: Vec<Peak> = peaks
        .into_iter()
        .map(|p| Peak {
            mass: hist.disk_mass(p.u, p.v, w),
            ..p
        })
        .collect();
    peaks.sort_by_key(|p| std::cmp::Reverse(p.mass)); // stable: ties keep discovery order
    RankedPeakSet { peaks, radius: w }
}

/// Per-pixel segment labels, `1..=8` by peak rank with 0 for unsegmented
/// (no disk, conflicting disks, or a pair that leaves the tile).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentationMap {
    width: usize,
    height: usize,
    labels: Vec<u8>,
}

impl SegmentationMap {
    /// Builds a map from explicit labels (for synthetic segmentations).
    pub fn from_labels(
        width: usize,
        height: usize,
        labels: Vec<u8>,
    ) -> Result<Self, SegmentError> {
        assert_eq!(labels.len(), width * height);
        if let Some(&bad) = labels.iter().find(|&&l| l as usize > MAX_PEAKS) {
            return Err(SegmentError::InvalidLabel(bad));
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn label(&self, x: usize, y: usize) -> u8 {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Pixel count per label, indexed `0..=8`.
    pub fn area_by_label(&self) -> [u64; MAX_PEAKS + 1] {
        let mut areas = [0u64; MAX_PEAKS + 1];
        for &l in &self.labels {
            areas[l as usize] += 1;
        }
        areas
    }

    /// Renders the map through [`SEGMENT_PALETTE`] as packed RGB bytes.
    pub fn to_rgb8(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.labels.len() * 3);
        for &l in &self.labels {
            out.extend_from_slice(&SEGMENT_PALETTE[l as usize]);
        }
        out
    }
}

/// Labels every pixel by testing its pair point against the ranked peak
/// disks. A pixel whose partner is out of bounds or in another tile gets
/// label 0, as does any pair point inside zero or several disks. An empty
/// peak set yields an all-zero map.
pub fn assign_segments(
    plane: &StretchedPlane,
    ranked: &RankedPeakSet,
    offset: PairOffset,
    tiles: &TileGrid,
) -> SegmentationMap {
    let levels = plane.levels();
    let lut = ranked.label_lut(levels);
    let mut labels = vec![0u8; plane.width() * plane.height()];
    for y in 0..plane.height() {
        for x in 0..plane.width() {
            if let Some((qx, qy)) = offset.partner(x, y, plane.width(), plane.height(), tiles) {
                let u = plane.bin(x, y) as usize;
                let v = plane.bin(qx, qy) as usize;
                labels[y * plane.width() + x] = lut[u * levels + v];
            }
        }
    }
    SegmentationMap {
        width: plane.width(),
        height: plane.height(),
        labels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stretched(w: usize, h: usize, levels: usize, bins: Vec<u16>) -> StretchedPlane {
        StretchedPlane::from_bins(w, h, levels, bins).unwrap()
    }

    fn hist_from(levels: usize, entries: &[(usize, usize, u64)]) -> CooccurrenceHistogram {
        let mut counts = vec![0u64; levels * levels];
        for &(u, v, c) in entries {
            counts[u * levels + v] = c;
        }
        CooccurrenceHistogram { levels, counts }
    }

    #[test]
    fn three_pixel_row_counts_two_pairs() {
        let plane = stretched(3, 1, 16, vec![2, 7, 7]);
        let hist = cooccurrence(&plane, PairOffset::default(), &TileGrid::single(3, 1));
        assert_eq!(hist.get(2, 7), 1);
        assert_eq!(hist.get(7, 7), 1);
        assert_eq!(hist.total(), 2);
    }

    #[test]
    fn constant_plane_pairs_land_in_one_bin() {
        let plane = stretched(5, 4, 8, vec![3; 20]);
        let hist = cooccurrence(&plane, PairOffset::default(), &TileGrid::single(5, 4));
        assert_eq!(hist.get(3, 3), 4 * 4);
        assert_eq!(hist.total(), 16);
    }

    #[test]
    fn tile_edges_exclude_crossing_pairs() {
        // Two 2-wide tiles: pairs from x=1 to x=2 are dropped.
        let plane = stretched(4, 1, 4, vec![0, 1, 2, 3]);
        let hist = cooccurrence(&plane, PairOffset::default(), &TileGrid::new(2, 1));
        assert_eq!(hist.total(), 2);
        assert_eq!(hist.get(0, 1), 1);
        assert_eq!(hist.get(1, 2), 0);
        assert_eq!(hist.get(2, 3), 1);
    }

    #[test]
    fn vertical_offset_pairs_move_down() {
        let plane = stretched(1, 3, 4, vec![0, 1, 2]);
        let offset = PairOffset::new(0, 1).unwrap();
        let hist = cooccurrence(&plane, offset, &TileGrid::single(1, 3));
        assert_eq!(hist.get(0, 1), 1);
        assert_eq!(hist.get(1, 2), 1);
        assert_eq!(hist.total(), 2);
    }

    #[test]
    fn single_nonzero_bin_yields_one_peak() {
        let hist = hist_from(32, &[(4, 9, 11)]);
        let peaks = locate_peaks(&hist, 8, 3.0);
        assert_eq!(peaks.len(), 1);
        assert_eq!((peaks[0].u, peaks[0].v, peaks[0].height), (4, 9, 11));
    }

    #[test]
    fn distant_bins_both_found_in_height_order() {
        let hist = hist_from(32, &[(2, 2, 5), (20, 20, 9)]);
        let peaks = locate_peaks(&hist, 8, 3.0);
        assert_eq!(peaks.len(), 2);
        assert_eq!((peaks[0].u, peaks[0].v), (20, 20));
        assert_eq!((peaks[1].u, peaks[1].v), (2, 2));
    }

    #[test]
    fn masked_neighbor_is_swallowed() {
        let hist = hist_from(32, &[(10, 10, 9), (11, 11, 5)]);
        let peaks = locate_peaks(&hist, 8, 3.0);
        assert_eq!(peaks.len(), 1);
    }

    #[test]
    fn equal_heights_break_ties_lexicographically() {
        let hist = hist_from(32, &[(9, 20, 7), (9, 4, 7), (25, 1, 7)]);
        let peaks = locate_peaks(&hist, 8, 3.0);
        let order: Vec<_> = peaks.iter().map(|p| (p.u, p.v)).collect();
        assert_eq!(order, vec![(9, 4), (9, 20), (25, 1)]);
    }

    #[test]
    fn max_peaks_limits_the_search() {
        let hist = hist_from(32, &[(0, 0, 9), (10, 10, 8), (20, 20, 7)]);
        assert_eq!(locate_peaks(&hist, 2, 3.0).len(), 2);
    }

    #[test]
    fn broad_peak_outranks_tall_spike() {
        // Spike of 100 vs a 60-high plateau whose w-disk holds 260 pairs.
        let hist = hist_from(
            64,
            &[
                (10, 10, 100),
                (40, 40, 60),
                (41, 40, 50),
                (39, 40, 50),
                (40, 41, 50),
                (40, 39, 50),
            ],
        );
        let peaks = locate_peaks(&hist, 8, 5.0);
        assert_eq!((peaks[0].u, peaks[0].v), (10, 10), "spike found first");
        let ranked = rank_peaks(&hist, peaks, 5.0);
        assert_eq!((ranked.peaks()[0].u, ranked.peaks()[0].v), (40, 40));
        assert_eq!(ranked.peaks()[0].mass, 260);
        assert_eq!(ranked.peaks()[1].mass, 100);
    }

    #[test]
    fn equal_masses_keep_discovery_order() {
        let hist = hist_from(32, &[(1, 1, 9), (20, 20, 9)]);
        let peaks = locate_peaks(&hist, 8, 2.0);
        let ranked = rank_peaks(&hist, peaks, 2.0);
        assert_eq!((ranked.peaks()[0].u, ranked.peaks()[0].v), (1, 1));
        assert_eq!((ranked.peaks()[1].u, ranked.peaks()[1].v), (20, 20));
    }

    #[test]
    fn single_peak_rank_is_one() {
        let hist = hist_from(16, &[(3, 3, 4)]);
        let ranked = rank_peaks(&hist, locate_peaks(&hist, 8, 2.0), 2.0);
        assert_eq!(ranked.len(), 1);
        assert!(ranked.peaks()[0].mass >= ranked.peaks()[0].height);
    }

    #[test]
    fn constant_plane_labels_all_but_tile_edges() {
        let plane = stretched(6, 2, 8, vec![5; 12]);
        let tiles = TileGrid::new(3, 2); // two tiles side by side
        let hist = cooccurrence(&plane, PairOffset::default(), &tiles);
        let ranked = rank_peaks(&hist, locate_peaks(&hist, 8, 2.0), 2.0);
        let seg = assign_segments(&plane, &ranked, PairOffset::default(), &tiles);
        for y in 0..2 {
            for x in 0..6 {
                let expect = if x == 2 || x == 5 { 0 } else { 1 };
                assert_eq!(seg.label(x, y), expect, "at ({x},{y})");
            }
        }
    }

    #[test]
    fn pair_point_in_third_disk_gets_label_three() {
        let plane = stretched(2, 1, 64, vec![40, 41]);
        let hist = hist_from(64, &[(0, 0, 50), (20, 20, 30), (40, 41, 10)]);
        let ranked = rank_peaks(&hist, locate_peaks(&hist, 8, 3.0), 3.0);
        let seg = assign_segments(&plane, &ranked, PairOffset::default(), &TileGrid::single(2, 1));
        assert_eq!(seg.label(0, 0), 3);
        assert_eq!(seg.label(1, 0), 0, "partner out of bounds");
    }

    #[test]
    fn overlapping_disks_reject_the_pair_as_conflict() {
        // Peaks 8 apart with radius 5: the midpoint bin lies in both disks.
        let hist = hist_from(64, &[(20, 20, 50), (28, 20, 40)]);
        let ranked = rank_peaks(&hist, locate_peaks(&hist, 8, 5.0), 5.0);
        assert_eq!(ranked.len(), 2);
        let plane = stretched(2, 1, 64, vec![24, 20]);
        let seg = assign_segments(&plane, &ranked, PairOffset::default(), &TileGrid::single(2, 1));
        assert_eq!(seg.label(0, 0), 0, "pair point (24,20) is in both disks");
    }

    #[test]
    fn empty_peak_set_leaves_everything_unsegmented() {
        let plane = stretched(3, 3, 8, vec![1; 9]);
        let ranked = RankedPeakSet {
            peaks: vec![],
            radius: 5.0,
        };
        let seg = assign_segments(&plane, &ranked, PairOffset::default(), &TileGrid::single(3, 3));
        assert!(seg.labels().iter().all(|&l| l == 0));
    }

    #[test]
    fn palette_renders_labels() {
        let plane = stretched(3, 1, 8, vec![1, 1, 1]);
        let tiles = TileGrid::single(3, 1);
        let hist = cooccurrence(&plane, PairOffset::default(), &tiles);
        let ranked = rank_peaks(&hist, locate_peaks(&hist, 8, 2.0), 2.0);
        let seg = assign_segments(&plane, &ranked, PairOffset::default(), &tiles);
        let rgb = seg.to_rgb8();
        assert_eq!(&rgb[0..3], &[255, 0, 0], "rank 1 renders red");
        assert_eq!(&rgb[6..9], &[0, 0, 0], "unsegmented renders black");
    }
}
