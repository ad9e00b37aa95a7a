//! `madetect search`: find the best-scoring ensemble on a training set.
//!
//! Outputs: a summary report (JSON or CSV), the chosen members as an
//! ensemble file `fuse` can consume, a preprocessing x extractor membership
//! table, and the full evaluation log as CSV.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use madetect_core::data::load_dataset;
use madetect_core::search::{search, SearchResult};
use madetect_core::{Ensemble, Error, ExtractorId, PreprocessingId, Result};

use crate::config::PipelineConfig;
use crate::report::{kv_csv, write_atomic, ReportFormat};

use super::fuse::format_ensemble;
use super::{dataset_width, resolve_manifest, resolve_out, training_images};

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Dataset manifest; defaults to the configured training manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Output directory for the report files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Grid of the pool with an `x` where the ensemble holds the pair.
pub fn membership_table(ensemble: &Ensemble) -> String {
    let col_width = 1 + ExtractorId::ALL
        .iter()
        .map(|e| e.as_str().len())
        .max()
        .unwrap_or(0);
    let row_width = 1 + PreprocessingId::ALL
        .iter()
        .map(|p| p.as_str().len())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    let _ = write!(out, "{:row_width$}", "");
    for ex in ExtractorId::ALL {
        let _ = write!(out, "{:>col_width$}", ex.as_str());
    }
    out.push('\n');
    for pp in PreprocessingId::ALL {
        let _ = write!(out, "{:row_width$}", pp.as_str());
        for ex in ExtractorId::ALL {
            let id = madetect_core::PairId::new(pp, ex);
            let mark = if ensemble.members().contains(&id) { "x" } else { "." };
            let _ = write!(out, "{mark:>col_width$}");
        }
        out.push('\n');
    }
    out
}

/// The evaluation log as CSV, one visited subset per row.
pub fn log_csv(result: &SearchResult) -> String {
    let mut out = String::from("step,ensemble,cpm\n");
    for (i, (signature, score)) in result.evaluation_log.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", i + 1, signature.replace(" + ", "+"), score);
    }
    out
}

pub fn run(args: &SearchArgs, config: &PipelineConfig, format: ReportFormat) -> Result<()> {
    let manifest = resolve_manifest(args.manifest.clone(), config, true)?;
    let out = resolve_out(args.out.clone(), config, "search");

    let ds = load_dataset(&manifest)?;
    let search_config = config.search_config(dataset_width(&ds));
    let training = training_images(&ds);
    let result = search(&search_config, &training)?;

    write_atomic(&out.join("ensemble.txt"), &format_ensemble(&result.best_ensemble))?;
    write_atomic(&out.join("membership.txt"), &membership_table(&result.best_ensemble))?;
    write_atomic(&out.join("log.csv"), &log_csv(&result))?;

    let report_path = out.join(format!("report.{}", format.extension()));
    let report = match format {
        ReportFormat::Json => {
            let body = serde_json::json!({
                "best_ensemble": result.best_ensemble.members(),
                "best_cpm": result.best_cpm,
                "evaluations": result.evaluation_log.len(),
                "pool_size": search_config.pool.len(),
                "mode": search_config.mode,
                "images": training.len(),
            });
            serde_json::to_string_pretty(&body)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?
                + "\n"
        }
        ReportFormat::Csv => kv_csv(&[
            ("best_ensemble", result.best_ensemble.signature().replace(" + ", "+")),
            ("best_cpm", result.best_cpm.to_string()),
            ("evaluations", result.evaluation_log.len().to_string()),
            ("pool_size", search_config.pool.len().to_string()),
            ("images", training.len().to_string()),
        ]),
    };
    write_atomic(&report_path, &report)?;

    println!(
        "best ensemble {} with training CPM {} ({} evaluations) -> {}",
        result.best_ensemble.signature(),
        result.best_cpm,
        result.evaluation_log.len(),
        out.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use madetect_core::PairId;

    #[test]
    fn membership_table_marks_exactly_the_members() {
        let ensemble = Ensemble::new(vec![
            PairId::new(PreprocessingId::Clahe, ExtractorId::Walter),
            PairId::new(PreprocessingId::None, ExtractorId::Lazar),
        ])
        .unwrap();
        let table = membership_table(&ensemble);
        assert_eq!(table.matches('x').count(), 2);
        assert_eq!(table.lines().count(), 1 + PreprocessingId::ALL.len());
        let header = table.lines().next().unwrap();
        for ex in ExtractorId::ALL {
            assert!(header.contains(ex.as_str()));
        }
    }
}
