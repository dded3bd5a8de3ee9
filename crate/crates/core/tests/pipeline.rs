//! End-to-end runs of the survey pipeline over synthetic scenes.

use std::fs;
use std::path::Path;

use outcrop_core::netpbm;
use outcrop_core::pipeline::{run_pipeline, RunConfig};
use outcrop_core::synth::{patch_scene, uniform_scene};

fn write_scene(dir: &Path, name: &str, scene: &outcrop_core::SceneImage) -> std::path::PathBuf {
    let path = dir.join(name);
    netpbm::save_raster(&path, scene.image()).unwrap();
    path
}

#[test]
fn uniform_scene_yields_no_interest_points_or_boxes() {
    let dir = tempfile::tempdir().unwrap();
    let scene = uniform_scene(160, 120, 0.5);
    let cfg = RunConfig {
        scene: write_scene(dir.path(), "scene.ppm", &scene),
        out_dir: dir.path().join("out"),
        ..Default::default()
    };
    let report = run_pipeline(&cfg).unwrap();
    assert!(report.interest_points.is_empty());

    // The annotated mosaic must be the plain gray intensity render: no box
    // pixels in rank colors anywhere.
    let annotated = netpbm::load_raster(cfg.out_dir.join("annotated.ppm")).unwrap();
    for px in annotated.pixels() {
        assert_eq!(px[0], px[1]);
        assert_eq!(px[1], px[2]);
    }
    assert!(!cfg.out_dir.join("chip_1.ppm").exists());
}

#[test]
fn patch_scene_reacquires_the_patch_in_chip_one() {
    let dir = tempfile::tempdir().unwrap();
    // 400x400 scene split 2x2 so each chip is a quarter of the scene.
    let patch = (120, 260, 12, 12);
    let scene = patch_scene(400, 400, 0.5, patch, 0.9);
    let cfg = RunConfig {
        scene: write_scene(dir.path(), "scene.ppm", &scene),
        grid_cols: 2,
        grid_rows: 2,
        out_dir: dir.path().join("out"),
        ..Default::default()
    };
    let report = run_pipeline(&cfg).unwrap();
    let top = &report.interest_points[0];
    assert_eq!(top.rank, 1);

    // Chip geometry: a 200x200 full-resolution crop centered on the top
    // point must contain the patch center.
    let (cx, cy) = (patch.0 + patch.2 / 2, patch.1 + patch.3 / 2);
    let fov = (report.scene_width / report.grid_cols, report.scene_height / report.grid_rows);
    let left = top.scene_x.saturating_sub(fov.0 / 2).min(report.scene_width - fov.0);
    let topy = top.scene_y.saturating_sub(fov.1 / 2).min(report.scene_height - fov.1);
    assert!(
        (left..left + fov.0).contains(&cx) && (topy..topy + fov.1).contains(&cy),
        "chip window ({left},{topy})+{fov:?} misses patch center ({cx},{cy})"
    );

    // And the written chip actually holds bright patch pixels.
    let chip = netpbm::load_raster(cfg.out_dir.join("chip_1.ppm")).unwrap();
    assert_eq!((chip.width(), chip.height()), (200, 200));
    let bright = chip.pixels().iter().filter(|p| p[0] > 0.7).count();
    assert_eq!(bright, patch.2 * patch.3, "whole patch inside the chip");
}

#[test]
fn artifact_tree_is_complete_with_mosaic_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let scene = patch_scene(200, 200, 0.5, (100, 60, 10, 10), 0.9);
    let cfg = RunConfig {
        scene: write_scene(dir.path(), "scene.ppm", &scene),
        out_dir: dir.path().join("out"),
        ..Default::default()
    };
    let report = run_pipeline(&cfg).unwrap();
    assert_eq!((report.mosaic_width, report.mosaic_height), (50, 50));

    for name in [
        "mosaic_h.pgm",
        "mosaic_s.pgm",
        "mosaic_i.pgm",
        "uncommon_h.pgm",
        "uncommon_s.pgm",
        "uncommon_i.pgm",
        "interest.pgm",
        "interest_blurred.pgm",
    ] {
        let img = netpbm::load_raster(cfg.out_dir.join(name)).unwrap();
        assert_eq!(
            (img.width(), img.height()),
            (50, 50),
            "{name} must have the mosaic dimensions"
        );
    }
    for name in ["seg_h.ppm", "seg_s.ppm", "seg_i.ppm", "annotated.ppm"] {
        let img = netpbm::load_raster(cfg.out_dir.join(name)).unwrap();
        assert_eq!((img.width(), img.height()), (50, 50));
    }
    for name in ["hist_h.pgm", "hist_s.pgm", "hist_i.pgm"] {
        let img = netpbm::load_raster(cfg.out_dir.join(name)).unwrap();
        assert_eq!((img.width(), img.height()), (256, 256));
    }

    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(cfg.out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["planes"].as_array().unwrap().len(), 3);
    assert!(json["interest_points"].as_array().unwrap().len() <= 3);
    assert!(json.get("timings").is_none(), "timings stay out of the JSON");

    // Stage timings are still reported in-process.
    let stages: Vec<_> = report.timings.iter().map(|t| t.stage).collect();
    assert!(stages.contains(&"mosaic") && stages.contains(&"segment"));
}

#[test]
fn png_scene_loads_through_the_same_path() {
    let dir = tempfile::tempdir().unwrap();
    let scene = patch_scene(64, 64, 0.4, (30, 30, 6, 6), 0.95);
    let png_path = dir.path().join("scene.png");
    let rgb8 = scene.image().to_rgb8();
    image::save_buffer(
        &png_path,
        &rgb8,
        64,
        64,
        image::ExtendedColorType::Rgb8,
    )
    .unwrap();
    let cfg = RunConfig {
        scene: png_path,
        downsample: 2,
        out_dir: dir.path().join("out"),
        ..Default::default()
    };
    let report = run_pipeline(&cfg).unwrap();
    assert_eq!((report.mosaic_width, report.mosaic_height), (32, 32));
}

#[test]
fn seam_mismatch_configuration_is_accepted() {
    // Steps smaller than the fov overlap subimages, reproducing the visible
    // seams of a miscalibrated zoom; the pipeline must still run.
    let dir = tempfile::tempdir().unwrap();
    let scene = patch_scene(200, 200, 0.5, (40, 40, 20, 20), 0.9);
    let cfg = RunConfig {
        scene: write_scene(dir.path(), "scene.ppm", &scene),
        grid_cols: 2,
        grid_rows: 2,
        fov: Some((80, 80)),
        step: Some((60, 60)),
        out_dir: dir.path().join("out"),
        ..Default::default()
    };
    let report = run_pipeline(&cfg).unwrap();
    assert_eq!((report.mosaic_width, report.mosaic_height), (40, 40));
}
