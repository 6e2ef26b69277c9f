//! Font size learning and detection for text lines in run-length
//! compressed binary document images.
//!
//! The pipeline never expands a page to pixels: the projection profile,
//! line segmentation and every per-line feature are computed on the run
//! pairs directly. Raster codecs and conversions exist for interchange and
//! for cross-checking the run-domain math against brute force.
//!
//! Modules, in pipeline order:
//!
//! * [`rle`] run-pair image model plus encode/decode against rasters
//! * [`docio`] PBM and `.rld` file formats
//! * [`synthgen`] deterministic synthetic pages with ground truth
//! * [`segmentation`] projection profile and line splitting
//! * [`features`] per-line heights, lengths and densities
//! * [`classify`] density-band line classification
//! * [`regression`] size/height line fitting and inverse prediction
//! * [`detector`] the assembled recognition pipeline and scoring
//! * [`bench`] run-domain vs raster timing comparison

pub mod bench;
pub mod classify;
pub mod detector;
pub mod docio;
pub mod error;
pub mod features;
pub mod regression;
pub mod rle;
pub mod segmentation;
pub mod synthgen;

pub use classify::{classify_line, LineClass, MhdThresholds};
pub use detector::{
    detect_document, score, DetectOptions, DocumentReport, ModelSet, Routing, DEFAULT_CANDIDATES,
};
pub use error::{Error, Result};
pub use features::{extract_features, DensityReport, LineFeatures};
pub use regression::{
    fit, predict_size, FeatureKind, FontSizeEstimate, RegressionModel, TrainingSet,
};
pub use rle::{decode, encode, Bitmap, CompressedImage, RunPair};
pub use segmentation::{segment_lines, vpp, LineBounds, ProjectionProfile};
pub use synthgen::{generate_page, GeometryTable, GroundTruth, LineSpec, PageLayout};
