//! `madetect extract`: run one preprocessing/extractor pair over a dataset
//! and write its raw per-image candidate files.

use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use madetect_core::data::{format_candidates, load_dataset};
use madetect_core::types::Candidate;
use madetect_core::{PairId, Result};

use crate::config::PipelineConfig;
use crate::report::write_atomic;

use super::{dataset_width, resolve_manifest, resolve_out};

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Dataset manifest; defaults to the configured test manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Pair to run, e.g. "clahe:walter".
    #[arg(long)]
    pub pair: PairId,
    /// Output directory for the candidate files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Directory-safe form of a pair id ("clahe:walter" -> "clahe_walter").
pub fn pair_dir_name(id: PairId) -> String {
    id.to_string().replace(':', "_")
}

pub fn run(args: &ExtractArgs, config: &PipelineConfig) -> Result<()> {
    let manifest = resolve_manifest(args.manifest.clone(), config, false)?;
    let out = resolve_out(args.out.clone(), config, "candidates");

    let ds = load_dataset(&manifest)?;
    let scale = config.scale_for_width(dataset_width(&ds));
    let pair = config.pair(args.pair, scale);
    pair.validate()?;

    let per_image: Vec<Vec<Candidate>> = ds
        .entries
        .par_iter()
        .map(|e| pair.run_on(&e.image))
        .collect::<Result<_>>()?;

    let dir = out.join(pair_dir_name(args.pair));
    for (e, cands) in ds.entries.iter().zip(&per_image) {
        write_atomic(&dir.join(format!("{}.txt", e.name)), &format_candidates(cands))?;
    }

    let total: usize = per_image.iter().map(Vec::len).sum();
    println!(
        "{}: {} candidates across {} images -> {}",
        args.pair,
        total,
        ds.entries.len(),
        dir.display()
    );
    Ok(())
}
