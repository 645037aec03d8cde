//! Offline handwritten English character recognition built on an additive
//! outer-product knowledge base.
//!
//! The pipeline parses PNM character patches, crops them to the inked
//! region of interest, normalizes them onto a fixed binary feature grid
//! (8x6 by default), and encodes the grid as a bipolar vector. Training
//! accumulates `input x target^T` into an integer weight matrix with
//! one-hot class targets; classification is a correlation argmax over the
//! class columns plus a thresholded cluster-membership test.
//!
//! - [`pnm`] — PBM/PGM parsing, canonical serialization, binarization
//! - [`preprocess`] — crop, grid normalization, bipolar encoding
//! - [`net`] — knowledge base, training, classification, persistence
//! - [`harness`] — prototype glyphs, seeded perturbation, recognition
//!   reports

pub mod harness;
pub mod net;
pub mod pnm;
pub mod preprocess;

pub use harness::{
    evaluate, perturb, prototype, run_experiment, ClassStats, DatasetManifest, ExperimentConfig,
    HarnessError, RateTable, RecognitionReport,
};
pub use net::{Classification, KnowledgeBase, LabelTable, NetError, TargetVector};
pub use pnm::{
    binarize, default_threshold, parse_pnm, write_pnm, BinaryImage, PnmError, PnmImage, RasterImage,
};
pub use preprocess::{
    crop, decode, encode, pipeline, to_grid, BinaryGrid, FeatureVector, PreprocessConfig,
    PreprocessError,
};
