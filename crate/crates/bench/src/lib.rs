//! Shared fixtures for the pipeline benchmarks.

use outcrop_core::preprocess::StretchedPlane;
use outcrop_core::InterestMap;

/// A mosaic-sized stretched plane with dense, varied bins (worst-ish case
/// for histogramming and assignment).
pub fn dense_plane(width: usize, height: usize, levels: usize) -> StretchedPlane {
    let bins = (0..width * height)
        .map(|i| {
            let (x, y) = (i % width, i / width);
            ((x * 37 + y * 61 + (x * y) % 13) % levels) as u16
        })
        .collect();
    StretchedPlane::from_bins(width, height, levels, bins).expect("bins in range")
}

/// A mosaic-sized interest map with scattered bumps.
pub fn bumpy_map(width: usize, height: usize) -> InterestMap {
    let values = (0..width * height)
        .map(|i| {
            let (x, y) = (i % width, i / width);
            3.0 + ((x * 13 + y * 29) % 7) as f64 * 0.5
        })
        .collect();
    InterestMap::from_values(width, height, values).expect("non-negative")
}
