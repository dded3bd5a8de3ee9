//! Interest-point survey pipeline for a simulated pan-tilt camera.
//!
//! Given a large scene raster, the library sweeps a virtual camera over it to
//! assemble a downsampled HSI quasi-mosaic, segments each of the hue,
//! saturation and intensity planes with co-occurrence histogram peaks, turns
//! the segmentations into uncommon maps (smaller segments score higher), fuses
//! and blurs those into an interest map, and finally re-points the camera to
//! grab full-resolution chips at the top-scoring interest points.
//!
//! The stages are exposed as plain functions over value types so that each
//! one can be driven and checked in isolation:
//!
//! 1. [`vcam::build_mosaic`] — crop subimages, convert to HSI
//!    ([`raster::rgb_to_hsi`]), median/mean downsample ([`preprocess`]), butt
//!    the tiles into a mosaic.
//! 2. [`segment::cooccurrence`] / [`segment::locate_peaks`] /
//!    [`segment::rank_peaks`] / [`segment::assign_segments`] — per-plane
//!    pair-value histogramming and peak-disk segment assignment.
//! 3. [`saliency::uncommon_map`] / [`saliency::fuse_interest`] /
//!    [`saliency::gaussian_blur`] / [`saliency::top_interest_points`].
//! 4. [`vcam::acquire_chip`] — map a mosaic coordinate back to the scene and
//!    crop at full resolution.
//!
//! [`pipeline::run_pipeline`] strings the stages together, writes every
//! intermediate artifact (PGM/PPM maps, annotated mosaic, chips, JSON
//! report) and is what the `outcrop` CLI wraps. Identical inputs always
//! produce byte-identical outputs.

pub mod netpbm;
pub mod pipeline;
pub mod preprocess;
pub mod raster;
pub mod saliency;
pub mod segment;
pub mod synth;
pub mod vcam;

pub use netpbm::{load_raster, save_raster, NetpbmError};
pub use pipeline::{run_pipeline, PipelineError, RunConfig, RunReport};
pub use preprocess::{
    block_median, downsample_mean, minmax_stretch, PreprocessConfig, PreprocessError,
    StretchedPlane,
};
pub use raster::{rgb_to_hsi, HsiPlanes, Plane, PlaneKind, RgbImage};
pub use saliency::{
    fuse_interest, gaussian_blur, top_interest_points, uncommon_map, InterestMap, InterestPoint,
    SaliencyConfig, SaliencyError, UncommonMap,
};
pub use segment::{
    assign_segments, cooccurrence, locate_peaks, rank_peaks, CooccurrenceHistogram, PairOffset,
    Peak, RankedPeakSet, SegmentationMap, MAX_PEAKS, SEGMENT_PALETTE,
};
pub use vcam::{
    acquire_chip, acquire_subimage, build_mosaic, CameraPose, Mosaic, SceneImage, TileGrid,
    VcamConfig, VcamError,
};
