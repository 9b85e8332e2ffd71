//! Grayscale edge detection with morphological amoebas.
//!
//! The crate provides flat morphology and four classic morphological edge
//! detectors, their amoeba counterparts (rank-order operators over
//! spatially-variant structuring elements grown per pixel by Dijkstra
//! region growing), a Canny baseline, the synthetic circle benchmark with
//! seeded noise, and Pratt FOM / ROC evaluation.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below name the common `f64` instantiations.

pub mod amoeba;
pub mod amoeba_morph;
pub mod canny;
pub mod cli;
pub mod detector;
pub mod edge_map;
pub mod error;
pub mod eval;
pub mod filters;
pub mod img;
pub mod io_util;
pub mod morph;
pub mod noise;
pub mod scalar;

pub use detector::{run_detector, DetectorKind, DetectorParams};
pub use edge_map::{BinaryEdgeMap, GroundTruth};
pub use error::{Error, Result};
pub use img::{PixelCoord, StructuringElement};
pub use scalar::Scalar;

pub type Image = img::Image<f64>;
pub type ImageF32 = img::Image<f32>;
pub type EdgeMap = edge_map::EdgeMap<f64>;
pub type EdgeMapF32 = edge_map::EdgeMap<f32>;
pub type AmoebaParams = amoeba::AmoebaParams<f64>;
pub type AmoebaField = amoeba::AmoebaField<f64>;
pub type AmoebaDetectorConfig = amoeba_morph::AmoebaDetectorConfig<f64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
