//! One module per subcommand, plus the path plumbing they share.

pub mod evaluate;
pub mod extract;
pub mod fuse;
pub mod grade;
pub mod search;
pub mod synth;

use std::path::PathBuf;

use madetect_core::data::Dataset;
use madetect_core::search::TrainingImage;
use madetect_core::{Error, Result};

use crate::config::PipelineConfig;

/// Environment variable that overrides the configured output directory.
pub const OUT_ENV: &str = "MADETECT_OUT";

/// Pick a command's output directory: an explicit `--out` wins, then the
/// environment override, then the configured directory; the last two get a
/// per-command subdirectory.
pub fn resolve_out(explicit: Option<PathBuf>, config: &PipelineConfig, sub: &str) -> PathBuf {
    match explicit {
        Some(p) => p,
        None => std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| config.output_dir.clone())
            .join(sub),
    }
}

/// Pick the manifest a command reads: `--manifest`, else the configured
/// training or test manifest depending on what the command is for.
pub fn resolve_manifest(
    explicit: Option<PathBuf>,
    config: &PipelineConfig,
    prefer_training: bool,
) -> Result<PathBuf> {
    let configured = if prefer_training {
        config.data.training_manifest.as_ref()
    } else {
        config.data.test_manifest.as_ref()
    };
    explicit.or_else(|| configured.cloned()).ok_or_else(|| {
        Error::InvalidConfig(format!(
            "no manifest given: pass --manifest or set data.{}_manifest",
            if prefer_training { "training" } else { "test" }
        ))
    })
}

/// Width every size parameter is rescaled to, taken from the first image.
pub fn dataset_width(ds: &Dataset) -> usize {
    ds.entries[0].image.width()
}

/// Strip a dataset down to what extraction and scoring consume.
pub fn training_images(ds: &Dataset) -> Vec<TrainingImage> {
    ds.entries
        .iter()
        .map(|e| TrainingImage {
            image: e.image.clone(),
            lesions: e.lesions.clone(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_out_beats_config() {
        let config = PipelineConfig::default();
        let out = resolve_out(Some(PathBuf::from("/tmp/x")), &config, "fused");
        assert_eq!(out, PathBuf::from("/tmp/x"));
        // No env override in unit tests: falls back to the config.
        if std::env::var_os(OUT_ENV).is_none() {
            let out = resolve_out(None, &config, "fused");
            assert_eq!(out, PathBuf::from("out/fused"));
        }
    }

    #[test]
    fn manifest_resolution_prefers_the_flag_and_errors_when_absent() {
        let mut config = PipelineConfig::default();
        assert!(resolve_manifest(None, &config, true).is_err());
        config.data.training_manifest = Some(PathBuf::from("train.toml"));
        assert_eq!(
            resolve_manifest(None, &config, true).unwrap(),
            PathBuf::from("train.toml")
        );
        assert_eq!(
            resolve_manifest(Some(PathBuf::from("x.toml")), &config, true).unwrap(),
            PathBuf::from("x.toml")
        );
        assert!(resolve_manifest(None, &config, false).is_err());
    }
}
