//! `madetect grade`: image-level screening report from fused candidates.
//!
//! Each image is called diseased when any fused candidate reaches the
//! confidence cutoff; the report sweeps the configured cutoffs and adds the
//! empirical ROC area over per-image scores.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;

use madetect_core::data::load_dataset;
use madetect_core::eval::{grade, GradeReport};
use madetect_core::types::Candidate;
use madetect_core::{Error, Grade, Result};

use crate::config::PipelineConfig;
use crate::report::{kv_csv, opt_cell, write_atomic, ReportFormat};

use super::evaluate::load_fused;
use super::{resolve_manifest, resolve_out};

#[derive(Debug, Args)]
pub struct GradeArgs {
    /// Dataset manifest; must declare grading. Defaults to the configured
    /// test manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Directory of fused candidate files, one `<name>.txt` per image.
    #[arg(long)]
    pub fused: PathBuf,
    /// Confidence cutoffs to sweep; defaults to the configured list.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    /// Output directory for the report files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn grade_csv(report: &GradeReport) -> String {
    let mut out = String::from(
        "threshold,sensitivity,specificity,accuracy,recognition_r0,recognition_r1,recognition_r2,recognition_r3\n",
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.threshold,
            opt_cell(r.sensitivity),
            opt_cell(r.specificity),
            r.accuracy,
            opt_cell(r.recognition[0]),
            opt_cell(r.recognition[1]),
            opt_cell(r.recognition[2]),
            opt_cell(r.recognition[3]),
        );
    }
    out
}

pub fn run(args: &GradeArgs, config: &PipelineConfig, format: ReportFormat) -> Result<()> {
    let manifest = resolve_manifest(args.manifest.clone(), config, false)?;
    let out = resolve_out(args.out.clone(), config, "grading");

    let ds = load_dataset(&manifest)?;
    if !ds.grading {
        return Err(Error::InvalidConfig(format!(
            "{} does not declare grading, so images carry no grade labels",
            manifest.display()
        )));
    }
    let fused = load_fused(&args.fused, &ds)?;
    let thresholds = args
        .thresholds
        .clone()
        .unwrap_or_else(|| config.evaluation.grading_thresholds.clone());

    let per_image: Vec<(&[Candidate], Grade)> = fused
        .iter()
        .zip(&ds.entries)
        .map(|(cands, e)| (cands.as_slice(), e.grade.expect("grading manifest")))
        .collect();
    let report = grade(&per_image, &thresholds)?;

    write_atomic(&out.join("grade_report.csv"), &grade_csv(&report))?;

    let diseased = per_image.iter().filter(|(_, g)| g.is_diseased()).count();
    let summary_path = out.join(format!("summary.{}", format.extension()));
    let summary = match format {
        ReportFormat::Json => {
            let body = serde_json::json!({
                "images": per_image.len(),
                "diseased": diseased,
                "healthy": per_image.len() - diseased,
                "thresholds": thresholds,
                "auc": report.auc,
            });
            serde_json::to_string_pretty(&body)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?
                + "\n"
        }
        ReportFormat::Csv => kv_csv(&[
            ("images", per_image.len().to_string()),
            ("diseased", diseased.to_string()),
            ("healthy", (per_image.len() - diseased).to_string()),
            ("auc", opt_cell(report.auc)),
        ]),
    };
    write_atomic(&summary_path, &summary)?;

    match report.auc {
        Some(auc) => println!(
            "{} images ({} diseased): ROC AUC {} -> {}",
            per_image.len(),
            diseased,
            auc,
            out.display()
        ),
        None => println!(
            "{} images ({} diseased): ROC AUC undefined (single-class data) -> {}",
            per_image.len(),
            diseased,
            out.display()
        ),
    }
    Ok(())
}
