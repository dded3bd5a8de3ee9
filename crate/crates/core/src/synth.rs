//! Deterministic synthetic scenes for tests, benchmarks and demos.

use crate::raster::RgbImage;
use crate::vcam::SceneImage;

/// A gray scene of constant intensity.
pub fn uniform_scene(width: usize, height: usize, gray: f64) -> SceneImage {
    RgbImage::from_fn(width, height, |_, _| [gray; 3]).into()
}

/// A gray scene with one rectangular gray patch of different intensity.
/// `patch` is `(x, y, w, h)` in scene pixels.
pub fn patch_scene(
    width: usize,
    height: usize,
    background: f64,
    patch: (usize, usize, usize, usize),
    value: f64,
) -> SceneImage {
    let (px, py, pw, ph) = patch;
    RgbImage::from_fn(width, height, |x, y| {
        if x >= px && x < px + pw && y >= py && y < py + ph {
            [value; 3]
        } else {
            [background; 3]
        }
    })
    .into()
}

/// A colorful deterministic noise scene (xorshift-based), useful for
/// exercising dense histograms.
pub fn noise_scene(width: usize, height: usize, seed: u64) -> SceneImage {
    let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).max(1);
    let mut next = move || {
        // xorshift64*
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        let v = state.wrapping_mul(0x2545_f491_4f6c_dd1d);
        (v >> 40) as f64 / ((1u64 << 24) as f64)
    };
    let mut pixels = Vec::with_capacity(width * height);
    for _ in 0..width * height {
        pixels.push([next(), next(), next()]);
    }
    SceneImage(RgbImage::new(width, height, pixels).expect("noise stays in range"))
}
