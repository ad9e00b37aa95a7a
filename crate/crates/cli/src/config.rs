//! Pipeline configuration: one TOML file with a section per stage.
//!
//! Every tunable of the library surfaces here with its default value; the
//! committed `configs/defaults.toml` materializes exactly this struct's
//! `Default` so the full parameter set is reviewable in one place. Unknown
//! keys are rejected everywhere.
//!
//! Pixel-denominated quantities that track lesion size — the fusion and
//! evaluation radii and the largest-lesion diameter — are stated at a
//! reference image width and scaled linearly to the width of the dataset
//! being processed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use madetect_core::extract::{
    ExtractorOp, HoughParams, LazarParams, SpencerParams, WalterParams, ZhangParams,
};
use madetect_core::preprocess::{
    ClaheParams, IlluminationEqParams, PreprocessingOp, VesselRemovalParams, WalterKleinParams,
};
use madetect_core::search::{AnnealingParams, SearchConfig, SearchMode, DEFAULT_EXHAUSTIVE_CAP};
use madetect_core::{DetectorPair, Error, ExtractorId, PairId, PreprocessingId, Result};

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_radius() -> f64 {
    5.0
}
fn default_reference_width() -> usize {
    768
}
fn default_exhaustive_cap() -> usize {
    DEFAULT_EXHAUSTIVE_CAP
}
fn default_search_mode() -> SearchMode {
    SearchMode::SimulatedAnnealing
}
fn default_thresholds() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Root of the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Where command outputs land unless overridden per invocation.
    pub output_dir: PathBuf,
    pub data: DataSettings,
    pub ensemble: EnsembleSettings,
    pub preprocessing: PreprocessingSettings,
    pub extractors: ExtractorSettings,
    pub search: SearchSettings,
    pub evaluation: EvaluationSettings,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            output_dir: default_output_dir(),
            data: DataSettings::default(),
            ensemble: EnsembleSettings::default(),
            preprocessing: PreprocessingSettings::default(),
            extractors: ExtractorSettings::default(),
            search: SearchSettings::default(),
            evaluation: EvaluationSettings::default(),
        }
    }
}

/// Default dataset locations, so commands can omit `--manifest`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub training_manifest: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_manifest: Option<PathBuf>,
}

/// Distances shared by fusion and scoring, stated at `reference_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleSettings {
    /// Candidates from different detectors closer than this merge.
    pub merge_radius: f64,
    /// A candidate within this distance of a lesion counts as a hit.
    pub match_radius: f64,
    /// Image width at which the radii and lesion diameters are calibrated.
    pub reference_width: usize,
}

impl Default for EnsembleSettings {
    fn default() -> Self {
        EnsembleSettings {
            merge_radius: default_radius(),
            match_radius: default_radius(),
            reference_width: default_reference_width(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreprocessingSettings {
    pub walter_klein: WalterKleinParams,
    pub clahe: ClaheParams,
    pub vessel_removal: VesselRemovalParams,
    pub illumination_eq: IlluminationEqParams,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractorSettings {
    pub walter: WalterParams,
    pub spencer: SpencerParams,
    pub hough: HoughParams,
    pub zhang: ZhangParams,
    pub lazar: LazarParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchSettings {
    pub mode: SearchMode,
    /// Largest pool `mode = "exhaustive"` accepts.
    pub exhaustive_cap: usize,
    /// Pairs to search over; `None` means every preprocessing x extractor
    /// combination.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pool: Option<Vec<PairId>>,
    pub annealing: AnnealingParams,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            mode: default_search_mode(),
            exhaustive_cap: default_exhaustive_cap(),
            pool: None,
            annealing: AnnealingParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluationSettings {
    /// Confidence cutoffs swept by the grading report.
    pub grading_thresholds: Vec<f64>,
}

impl Default for EvaluationSettings {
    fn default() -> Self {
        EvaluationSettings {
            grading_thresholds: default_thresholds(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: PipelineConfig = toml::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in [
            ("merge_radius", self.ensemble.merge_radius),
            ("match_radius", self.ensemble.match_radius),
        ] {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "ensemble.{name} {r} must be positive"
                )));
            }
        }
        if self.ensemble.reference_width == 0 {
            return Err(Error::InvalidConfig(
                "ensemble.reference_width must be positive".into(),
            ));
        }
        for id in PreprocessingId::ALL {
            self.preprocessing_op(id).validate()?;
        }
        for id in ExtractorId::ALL {
            self.extractor_op(id, 1.0).validate()?;
        }
        if self.search.exhaustive_cap == 0 {
            return Err(Error::InvalidConfig(
                "search.exhaustive_cap must be positive".into(),
            ));
        }
        self.search.annealing.validate()?;
        if let Some(pool) = &self.search.pool {
            if pool.is_empty() {
                return Err(Error::InvalidConfig("search.pool is empty".into()));
            }
            let mut ids = pool.clone();
            ids.sort();
            ids.dedup();
            if ids.len() != pool.len() {
                return Err(Error::InvalidConfig(
                    "search.pool lists a pair twice".into(),
                ));
            }
        }
        if self.evaluation.grading_thresholds.is_empty() {
            return Err(Error::InvalidConfig(
                "evaluation.grading_thresholds is empty".into(),
            ));
        }
        for &t in &self.evaluation.grading_thresholds {
            if !(t.is_finite() && (0.0..=1.0).contains(&t)) {
                return Err(Error::InvalidConfig(format!(
                    "grading threshold {t} must lie in [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Linear factor mapping reference-width pixel sizes to `width`.
    pub fn scale_for_width(&self, width: usize) -> f64 {
        width as f64 / self.ensemble.reference_width as f64
    }

    pub fn merge_radius(&self, scale: f64) -> f64 {
        self.ensemble.merge_radius * scale
    }

    pub fn match_radius(&self, scale: f64) -> f64 {
        self.ensemble.match_radius * scale
    }

    pub fn preprocessing_op(&self, id: PreprocessingId) -> PreprocessingOp {
        match id {
            PreprocessingId::WalterKlein => {
                PreprocessingOp::WalterKlein(self.preprocessing.walter_klein)
            }
            PreprocessingId::Clahe => PreprocessingOp::Clahe(self.preprocessing.clahe),
            PreprocessingId::VesselRemoval => {
                PreprocessingOp::VesselRemoval(self.preprocessing.vessel_removal)
            }
            PreprocessingId::IlluminationEq => {
                PreprocessingOp::IlluminationEq(self.preprocessing.illumination_eq)
            }
            PreprocessingId::None => PreprocessingOp::None,
        }
    }

    /// Materialize an extractor, rescaling its largest-lesion diameter from
    /// the reference width.
    pub fn extractor_op(&self, id: ExtractorId, scale: f64) -> ExtractorOp {
        match id {
            ExtractorId::Walter => {
                let mut p = self.extractors.walter.clone();
                p.max_diameter = ((p.max_diameter as f64 * scale).round() as u32).max(1);
                ExtractorOp::Walter(p)
            }
            ExtractorId::Spencer => ExtractorOp::Spencer(self.extractors.spencer.clone()),
            ExtractorId::Hough => ExtractorOp::Hough(self.extractors.hough.clone()),
            ExtractorId::Zhang => ExtractorOp::Zhang(self.extractors.zhang.clone()),
            ExtractorId::Lazar => ExtractorOp::Lazar(self.extractors.lazar.clone()),
        }
    }

    pub fn pair(&self, id: PairId, scale: f64) -> DetectorPair {
        DetectorPair::new(
            self.preprocessing_op(id.preprocessing),
            self.extractor_op(id.extractor, scale),
        )
    }

    /// The configured pool, or every combination when none is given.
    pub fn pool_ids(&self) -> Vec<PairId> {
        match &self.search.pool {
            Some(pool) => pool.clone(),
            None => PreprocessingId::ALL
                .into_iter()
                .flat_map(|pp| {
                    ExtractorId::ALL
                        .into_iter()
                        .map(move |ex| PairId::new(pp, ex))
                })
                .collect(),
        }
    }

    pub fn pool(&self, scale: f64) -> Vec<DetectorPair> {
        self.pool_ids()
            .into_iter()
            .map(|id| self.pair(id, scale))
            .collect()
    }

    /// Assemble the search configuration for a dataset of the given width.
    pub fn search_config(&self, width: usize) -> SearchConfig {
        let scale = self.scale_for_width(width);
        SearchConfig {
            pool: self.pool(scale),
            mode: self.search.mode,
            annealing: self.search.annealing.clone(),
            merge_radius: self.merge_radius(scale),
            match_radius: self.match_radius(scale),
            exhaustive_cap: self.search.exhaustive_cap,
        }
    }
}
