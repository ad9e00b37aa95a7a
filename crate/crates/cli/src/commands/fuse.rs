//! `madetect fuse`: run an ensemble over a dataset and write the fused,
//! confidence-weighted candidate files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;

use madetect_core::data::{format_candidates, load_dataset};
use madetect_core::search::CandidateCache;
use madetect_core::types::Candidate;
use madetect_core::{fuse, Ensemble, Error, PairId, Result};

use crate::config::PipelineConfig;
use crate::report::write_atomic;

use super::{dataset_width, resolve_manifest, resolve_out, training_images};

#[derive(Debug, Args)]
pub struct FuseArgs {
    /// Dataset manifest; defaults to the configured test manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Ensemble file: one pair id per line, `#` comments.
    #[arg(long)]
    pub ensemble: PathBuf,
    /// Output directory for the fused candidate files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse an ensemble file: one pair id per line, blank lines and `#`
/// comments skipped.
pub fn read_ensemble(path: &Path) -> Result<Ensemble> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut members = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let id: PairId = line
            .parse()
            .map_err(|e| Error::parse(path, li + 1, format!("{e}")))?;
        members.push(id);
    }
    Ensemble::new(members)
}

/// Render an ensemble in the file format `read_ensemble` parses.
pub fn format_ensemble(ensemble: &Ensemble) -> String {
    let mut out = String::from("# madetect ensemble v1\n");
    for id in ensemble.members() {
        out.push_str(&id.to_string());
        out.push('\n');
    }
    out
}

/// Fuse every image of a dataset under an ensemble. Returns per-image fused
/// candidate lists in manifest order.
pub fn fuse_dataset(
    config: &PipelineConfig,
    ensemble: &Ensemble,
    ds: &madetect_core::data::Dataset,
) -> Result<Vec<Vec<Candidate>>> {
    let scale = config.scale_for_width(dataset_width(ds));
    let pairs: Vec<_> = ensemble
        .members()
        .iter()
        .map(|&id| config.pair(id, scale))
        .collect();
    let cache = CandidateCache::build(&pairs, &training_images(ds))?;
    let merge_radius = config.merge_radius(scale);
    (0..ds.entries.len())
        .map(|img| {
            let lists: Vec<Vec<Candidate>> = (0..pairs.len())
                .map(|p| cache.candidates(p, img).to_vec())
                .collect();
            fuse(&lists, merge_radius)
        })
        .collect()
}

pub fn run(args: &FuseArgs, config: &PipelineConfig) -> Result<()> {
    let manifest = resolve_manifest(args.manifest.clone(), config, false)?;
    let out = resolve_out(args.out.clone(), config, "fused");

    let ensemble = read_ensemble(&args.ensemble)?;
    let ds = load_dataset(&manifest)?;
    let fused = fuse_dataset(config, &ensemble, &ds)?;

    for (e, cands) in ds.entries.iter().zip(&fused) {
        write_atomic(&out.join(format!("{}.txt", e.name)), &format_candidates(cands))?;
    }

    let total: usize = fused.iter().map(Vec::len).sum();
    println!(
        "{}: {} fused candidates across {} images -> {}",
        ensemble.signature(),
        total,
        ds.entries.len(),
        out.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use madetect_core::{ExtractorId, PreprocessingId};

    #[test]
    fn ensemble_file_round_trips_through_parser_and_formatter() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ensemble.txt");
        let ensemble = Ensemble::new(vec![
            PairId::new(PreprocessingId::Clahe, ExtractorId::Walter),
            PairId::new(PreprocessingId::None, ExtractorId::Lazar),
        ])
        .unwrap();
        fs::write(&path, format_ensemble(&ensemble)).unwrap();
        assert_eq!(read_ensemble(&path).unwrap(), ensemble);
    }

    #[test]
    fn ensemble_parser_reports_bad_lines_and_rejects_empty_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ensemble.txt");
        fs::write(&path, "# header\nclahe:walter\nnot-a-pair\n").unwrap();
        let err = read_ensemble(&path).unwrap_err().to_string();
        assert!(err.contains(":3:"), "{err}");

        fs::write(&path, "# only comments\n\n").unwrap();
        assert!(read_ensemble(&path).is_err());
    }
}
