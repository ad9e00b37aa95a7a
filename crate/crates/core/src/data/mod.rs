//! Reading and writing the on-disk formats: PNG images, candidate and
//! annotation text files, dataset manifests, and synthetic image sets.

pub mod candidates;
pub mod manifest;
pub mod png;
pub mod synth;

pub use candidates::{
    format_candidates, format_ground_truth, load_candidates, load_ground_truth,
    save_candidates, save_ground_truth,
};
pub use manifest::{load_dataset, Dataset, DatasetEntry, DatasetManifest, ManifestEntry};
pub use png::{encode_gray_png, load_green_channel, save_gray_png};
pub use synth::{generate_synthetic, SyntheticSpec};
