//! `madetect synth`: generate a synthetic dataset tree.
//!
//! Writes `images/<name>.png`, `annotations/<name>.txt`, the dataset
//! manifest, and the fully resolved generator spec, so the tree is
//! self-describing and directly consumable by every other command.

use std::fs;
use std::path::PathBuf;

use clap::Args;

use madetect_core::data::manifest::{DatasetManifest, ManifestEntry};
use madetect_core::data::synth::SyntheticSpec;
use madetect_core::data::{encode_gray_png, format_ground_truth, generate_synthetic};
use madetect_core::{Error, Result};

use crate::config::PipelineConfig;
use crate::report::{write_atomic, write_atomic_bytes};

use super::resolve_out;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator spec (TOML); defaults to the built-in spec.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Output directory for the dataset tree.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &SynthArgs, config: &PipelineConfig, seed: Option<u64>) -> Result<()> {
    let mut spec = match &args.spec {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            toml::from_str::<SyntheticSpec>(&text)
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
        }
        None => SyntheticSpec::default(),
    };
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let out = resolve_out(args.out.clone(), config, "dataset");

    let dataset = generate_synthetic(&spec)?;
    let mut entries = Vec::with_capacity(dataset.entries.len());
    for e in &dataset.entries {
        let image = PathBuf::from("images").join(format!("{}.png", e.name));
        let annotations = PathBuf::from("annotations").join(format!("{}.txt", e.name));
        write_atomic_bytes(&out.join(&image), &encode_gray_png(&e.image)?)?;
        write_atomic(&out.join(&annotations), &format_ground_truth(&e.lesions))?;
        entries.push(ManifestEntry {
            image,
            annotations: Some(annotations),
            lesions: None,
            grade: e.grade,
        });
    }

    let manifest = DatasetManifest {
        width: Some(spec.width as u32),
        height: Some(spec.height as u32),
        fov_threshold: madetect_core::data::manifest::DEFAULT_FOV_THRESHOLD,
        grading: true,
        entries,
    };
    let manifest_text = toml::to_string_pretty(&manifest)
        .map_err(|e| Error::Manifest(e.to_string()))?;
    write_atomic(&out.join("dataset.toml"), &manifest_text)?;

    let spec_text =
        toml::to_string_pretty(&spec).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    write_atomic(&out.join("spec.toml"), &spec_text)?;

    let lesions: usize = dataset.entries.iter().map(|e| e.lesions.len()).sum();
    println!(
        "wrote {} images ({} lesions) to {}",
        dataset.entries.len(),
        lesions,
        out.display()
    );
    Ok(())
}
