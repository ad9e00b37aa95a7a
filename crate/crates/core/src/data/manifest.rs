//! Dataset manifests: a TOML index of images, annotations and grades.
//!
//! A manifest names one image per entry plus its lesion centers, either as
//! a path to an annotation file or as an inline list. When the manifest
//! declares `grading = true` every entry also carries a retinopathy grade.
//! Relative paths resolve against the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::types::{Grade, GroundTruthPoint};

use super::candidates::load_ground_truth;
use super::png::load_green_channel;

pub const DEFAULT_FOV_THRESHOLD: f64 = 10.0;

fn default_fov_threshold() -> f64 {
    DEFAULT_FOV_THRESHOLD
}

/// Parsed manifest file, prior to any image loading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    /// Declared resolution; loaded images must match when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
    /// Green level above which a pixel counts as field of view.
    #[serde(default = "default_fov_threshold")]
    pub fov_threshold: f64,
    /// Grading mode: every entry must then carry a grade, and none otherwise.
    #[serde(default)]
    pub grading: bool,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub image: PathBuf,
    /// Path to an `x y` annotation file...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<PathBuf>,
    /// ...or the lesion centers inline. Exactly one of the two.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lesions: Option<Vec<(u32, u32)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade: Option<Grade>,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<DatasetManifest> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: DatasetManifest = toml::from_str(&text)
            .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let text = toml::to_string_pretty(self)
            .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::Manifest("manifest lists no entries".into()));
        }
        if !(self.fov_threshold.is_finite() && self.fov_threshold >= 0.0) {
            return Err(Error::Manifest(format!(
                "fov threshold {} must be non-negative",
                self.fov_threshold
            )));
        }
        for e in &self.entries {
            let name = e.image.display();
            match (&e.annotations, &e.lesions) {
                (Some(_), Some(_)) => {
                    return Err(Error::Manifest(format!(
                        "{name}: both an annotation file and inline lesions"
                    )))
                }
                (None, None) => {
                    return Err(Error::Manifest(format!(
                        "{name}: needs an annotation file or inline lesions"
                    )))
                }
                _ => {}
            }
            if self.grading && e.grade.is_none() {
                return Err(Error::Manifest(format!(
                    "{name}: grading mode needs a grade on every entry"
                )));
            }
            if !self.grading && e.grade.is_some() {
                return Err(Error::Manifest(format!(
                    "{name}: grade given but the manifest does not declare grading"
                )));
            }
        }
        Ok(())
    }
}

/// One loaded image with its ground truth.
#[derive(Debug, Clone)]
pub struct DatasetEntry {
    /// Image file stem, used to name derived files.
    pub name: String,
    pub image: GrayImage,
    pub lesions: Vec<GroundTruthPoint>,
    pub grade: Option<Grade>,
}

/// A fully loaded dataset.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub entries: Vec<DatasetEntry>,
    pub grading: bool,
}

impl Dataset {
    pub fn total_lesions(&self) -> usize {
        self.entries.iter().map(|e| e.lesions.len()).sum()
    }
}

/// Load every image and annotation a manifest names.
pub fn load_dataset(manifest_path: &Path) -> Result<Dataset> {
    let manifest = DatasetManifest::load(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let entries: Vec<DatasetEntry> = manifest
        .entries
        .par_iter()
        .map(|e| load_entry(&manifest, base, e))
        .collect::<Result<_>>()?;
    Ok(Dataset {
        entries,
        grading: manifest.grading,
    })
}

fn load_entry(
    manifest: &DatasetManifest,
    base: &Path,
    e: &ManifestEntry,
) -> Result<DatasetEntry> {
    let img_path = base.join(&e.image);
    let image = load_green_channel(&img_path, manifest.fov_threshold)?;
    let (w, h) = (image.width() as u32, image.height() as u32);
    if manifest.width.is_some_and(|dw| dw != w) || manifest.height.is_some_and(|dh| dh != h) {
        return Err(Error::Manifest(format!(
            "{}: image is {w}x{h}, manifest declares {}x{}",
            e.image.display(),
            manifest.width.map_or("any".into(), |v| v.to_string()),
            manifest.height.map_or("any".into(), |v| v.to_string()),
        )));
    }
    let lesions: Vec<GroundTruthPoint> = match (&e.annotations, &e.lesions) {
        (Some(p), None) => load_ground_truth(&base.join(p))?,
        (None, Some(v)) => v.iter().map(|&(x, y)| GroundTruthPoint::new(x, y)).collect(),
        _ => unreachable!("manifest was validated"),
    };
    for g in &lesions {
        if g.x >= w || g.y >= h {
            return Err(Error::Manifest(format!(
                "{}: lesion ({}, {}) outside the {w}x{h} image",
                e.image.display(),
                g.x,
                g.y
            )));
        }
    }
    let name = e
        .image
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| e.image.display().to_string());
    Ok(DatasetEntry {
        name,
        image,
        lesions,
        grade: e.grade,
    })
}
