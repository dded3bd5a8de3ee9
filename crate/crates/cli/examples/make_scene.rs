//! Writes a demo scene: a tan cliff-like gradient with a few anomalies
//! (a dark wet streak, a bright vein, a small green tuft) for the survey
//! pipeline to find.
//!
//! Usage: cargo run -p outcrop-cli --example make_scene -- [PATH]

use outcrop_core::netpbm;
use outcrop_core::raster::RgbImage;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "demo_scene.ppm".into());
    let (w, h) = (720usize, 576usize);
    let scene = RgbImage::from_fn(w, h, |x, y| {
        let fy = y as f64 / h as f64;
        // Banded tan background with gentle vertical shading.
        let band = 0.04 * (((y / 24) % 3) as f64);
        let mut rgb = [
            0.72 - 0.18 * fy + band,
            0.62 - 0.16 * fy + band,
            0.46 - 0.12 * fy + band,
        ];
        // Dark wet streak near the bottom left.
        if (140..190).contains(&x) && (430..530).contains(&y) {
            rgb = [0.16, 0.14, 0.13];
        }
        // Bright gypsum-like vein, thin and diagonal.
        if y > 120 && y < 360 && (x as i64 - (300 + (y as i64 - 120) / 4)).unsigned_abs() < 4 {
            rgb = [0.93, 0.92, 0.88];
        }
        // Small green tuft on the right.
        let (dx, dy) = (x as f64 - 560.0, y as f64 - 250.0);
        if dx * dx + dy * dy < 85.0 {
            rgb = [0.20, 0.52, 0.18];
        }
        rgb.map(|c| c.clamp(0.0, 1.0))
    });
    netpbm::save_raster(&path, &scene).expect("write scene");
    println!("wrote {w}x{h} demo scene to {path}");
}
