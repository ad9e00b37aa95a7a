//! `madetect evaluate`: score fused candidate files against a dataset's
//! ground truth. Writes the full free-response curve as CSV plus a summary
//! with the mean-sensitivity score and windowed partial AUC.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;

use madetect_core::data::{load_candidates, load_dataset, Dataset};
use madetect_core::eval::{cpm, froc, partial_auc, FrocCurve};
use madetect_core::types::Candidate;
use madetect_core::{Error, Result};

use crate::config::PipelineConfig;
use crate::report::{kv_csv, write_atomic, ReportFormat};

use super::{dataset_width, resolve_manifest, resolve_out};

/// False-positive-per-image window for the partial area computation.
pub const AUC_WINDOW: (f64, f64) = (0.125, 8.0);

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Dataset manifest; defaults to the configured test manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Directory of fused candidate files, one `<name>.txt` per image.
    #[arg(long)]
    pub fused: PathBuf,
    /// Output directory for the report files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Load `<name>.txt` from the fused directory for every dataset entry.
pub fn load_fused(dir: &Path, ds: &Dataset) -> Result<Vec<Vec<Candidate>>> {
    ds.entries
        .iter()
        .map(|e| {
            let path = dir.join(format!("{}.txt", e.name));
            if !path.exists() {
                return Err(Error::InvalidConfig(format!(
                    "no candidate file for image {:?}: expected {}",
                    e.name,
                    path.display()
                )));
            }
            load_candidates(&path)
        })
        .collect()
}

pub fn froc_csv(curve: &FrocCurve) -> String {
    let mut out = String::from("threshold,fp_per_image,sensitivity\n");
    for p in &curve.points {
        let _ = writeln!(out, "{},{},{}", p.threshold, p.fp_per_image, p.sensitivity);
    }
    out
}

pub fn run(args: &EvaluateArgs, config: &PipelineConfig, format: ReportFormat) -> Result<()> {
    let manifest = resolve_manifest(args.manifest.clone(), config, false)?;
    let out = resolve_out(args.out.clone(), config, "evaluation");

    let ds = load_dataset(&manifest)?;
    let fused = load_fused(&args.fused, &ds)?;
    let match_radius = config.match_radius(config.scale_for_width(dataset_width(&ds)));

    let per_image: Vec<(&[Candidate], &[madetect_core::GroundTruthPoint])> = fused
        .iter()
        .zip(&ds.entries)
        .map(|(cands, e)| (cands.as_slice(), e.lesions.as_slice()))
        .collect();
    let curve = froc(&per_image, match_radius)?;
    let score = cpm(&curve);
    let area = partial_auc(&curve, AUC_WINDOW.0, AUC_WINDOW.1)?;

    write_atomic(&out.join("froc.csv"), &froc_csv(&curve))?;

    let summary_path = out.join(format!("summary.{}", format.extension()));
    let summary = match format {
        ReportFormat::Json => {
            let body = serde_json::json!({
                "images": curve.image_count,
                "total_lesions": curve.total_lesions,
                "operating_points": curve.points.len(),
                "cpm": score,
                "partial_auc": area,
                "match_radius": match_radius,
            });
            serde_json::to_string_pretty(&body)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?
                + "\n"
        }
        ReportFormat::Csv => kv_csv(&[
            ("images", curve.image_count.to_string()),
            ("total_lesions", curve.total_lesions.to_string()),
            ("operating_points", curve.points.len().to_string()),
            ("cpm", score.to_string()),
            ("partial_auc", area.to_string()),
            ("match_radius", match_radius.to_string()),
        ]),
    };
    write_atomic(&summary_path, &summary)?;

    println!(
        "{} images, {} lesions: CPM {}, partial AUC {} -> {}",
        curve.image_count,
        curve.total_lesions,
        score,
        area,
        out.display()
    );
    Ok(())
}
