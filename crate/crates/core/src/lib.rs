//! Core library for ensemble-based detection of small dark lesions in
//! retinal fundus photographs.
//!
//! The pipeline: preprocess the green channel, extract lesion candidates
//! with several independent detectors, fuse the per-pair candidate lists
//! into confidence-weighted detections, score detection quality against
//! ground truth, and search the space of preprocessing/extractor pairs for
//! the ensemble that maximises that score. Image-level grading falls out of
//! the fused confidences.

pub mod data;
pub mod detector;
pub mod error;
pub mod eval;
pub mod extract;
pub mod fuse;
pub mod geometry;
pub mod image;
pub mod preprocess;
pub mod search;
pub mod types;

mod filter;
mod morph;
mod raster;
mod regions;

pub use data::{generate_synthetic, load_dataset, Dataset, DatasetManifest, SyntheticSpec};
pub use detector::{DetectorPair, Ensemble, ExtractorId, PairId, PreprocessingId};
pub use error::{Error, Result};
pub use eval::{cpm, froc, grade, partial_auc, FrocCurve, FrocPoint, GradeReport, MatchResult};
pub use fuse::{fuse, threshold_by_confidence};
pub use geometry::{centroid, euclidean_distance, Point};
pub use search::{
    evaluate_ensemble, search, CandidateCache, SearchConfig, SearchMode, SearchResult,
    TrainingImage,
};
pub use image::{GrayImage, IntensityRange};
pub use types::{Candidate, Grade, GroundTruthPoint};
