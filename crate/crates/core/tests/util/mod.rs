//! Brute-force oracles shared by the property and acceptance suites. These
//! deliberately take the slow, obvious route so they stay independent of the
//! library's single-pass and lookup-table implementations.

use outcrop_core::preprocess::StretchedPlane;
use outcrop_core::segment::{PairOffset, RankedPeakSet};
use outcrop_core::vcam::TileGrid;

/// Minimal deterministic RNG (xorshift64*) so acceptance runs are
/// reproducible without extra dependencies.
#[allow(dead_code)] // only the acceptance target uses it
pub struct TestRng(u64);

#[allow(dead_code)]
impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        self.0.wrapping_mul(0x2545_f491_4f6c_dd1d)
    }

    /// Uniform integer in `[lo, hi)`.
    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo) as u64) as usize
    }
}

/// Counts co-occurring pairs with a quadratic scan over all pixel pairs,
/// keeping only those at exactly the requested offset within one tile.
pub fn naive_cooccurrence(
    plane: &StretchedPlane,
    offset: PairOffset,
    tiles: &TileGrid,
) -> Vec<u64> {
    let levels = plane.levels();
    let mut counts = vec![0u64; levels * levels];
    for py in 0..plane.height() {
        for px in 0..plane.width() {
            for qy in 0..plane.height() {
                for qx in 0..plane.width() {
                    let at_offset = qx as i64 - px as i64 == i64::from(offset.dx())
                        && qy as i64 - py as i64 == i64::from(offset.dy());
                    if at_offset && tiles.same_tile(px, py, qx, qy) {
                        let u = plane.bin(px, py) as usize;
                        let v = plane.bin(qx, qy) as usize;
                        counts[u * levels + v] += 1;
                    }
                }
            }
        }
    }
    counts
}

/// Labels each pixel by directly measuring the distance from its pair point
/// to every ranked peak: exactly one disk hit gives that peak's rank,
/// anything else (no hit, conflict, missing partner) gives 0.
pub fn oracle_assign(
    plane: &StretchedPlane,
    ranked: &RankedPeakSet,
    offset: PairOffset,
    tiles: &TileGrid,
) -> Vec<u8> {
    let w_sq = ranked.radius() * ranked.radius();
    let mut labels = vec![0u8; plane.width() * plane.height()];
    for y in 0..plane.height() {
        for x in 0..plane.width() {
            let qx = x as i64 + i64::from(offset.dx());
            let qy = y as i64 + i64::from(offset.dy());
            if qx < 0
                || qy < 0
                || qx >= plane.width() as i64
                || qy >= plane.height() as i64
                || !tiles.same_tile(x, y, qx as usize, qy as usize)
            {
                continue;
            }
            let u = plane.bin(x, y) as f64;
            let v = plane.bin(qx as usize, qy as usize) as f64;
            let mut hit = None;
            let mut conflicted = false;
            for (idx, peak) in ranked.peaks().iter().enumerate() {
                let du = u - peak.u as f64;
                let dv = v - peak.v as f64;
                if du * du + dv * dv <= w_sq {
                    if hit.is_some() {
                        conflicted = true;
                    } else {
                        hit = Some(idx + 1);
                    }
                }
            }
            if !conflicted {
                if let Some(rank) = hit {
                    labels[y * plane.width() + x] = rank as u8;
                }
            }
        }
    }
    labels
}
