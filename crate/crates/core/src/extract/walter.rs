//! Candidate extraction by diameter closing of the dark image structures.
//!
//! Small dark blobs are the only structures whose largest bounding-box side
//! stays below the diameter bound; flattening everything below that bound in
//! the inverted view and looking at the residue isolates them. Elongated
//! structures reach the bound at a level just under their ridge line, so
//! their residue is negligible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::finalize_candidates;
use crate::image::GrayImage;
use crate::morph::diameter_opening;
use crate::regions::{hysteresis_components, pixel_centroid};
use crate::types::Candidate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WalterParams {
    /// Bounding-box side (px) above which a structure is considered too
    /// large to be a lesion.
    pub max_diameter: u32,
    /// Weak residue threshold, in quantized gray levels; weak pixels join a
    /// detection only when connected to a strong one.
    pub threshold_low: f64,
    /// Strong residue threshold, in quantized gray levels. This is the
    /// strictness knob.
    pub threshold_high: f64,
}

impl Default for WalterParams {
    fn default() -> Self {
        WalterParams {
            max_diameter: 9,
            threshold_low: 8.0,
            threshold_high: 16.0,
        }
    }
}

impl WalterParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_diameter < 2 {
            return Err(Error::InvalidParams(
                "max_diameter must be at least 2 px".into(),
            ));
        }
        if !(self.threshold_low.is_finite() && self.threshold_high.is_finite()) {
            return Err(Error::InvalidParams("thresholds must be finite".into()));
        }
        if self.threshold_low <= 0.0 || self.threshold_high < self.threshold_low {
            return Err(Error::InvalidParams(
                "need 0 < threshold_low <= threshold_high".into(),
            ));
        }
        Ok(())
    }
}

pub fn extract_walter(img: &GrayImage, params: &WalterParams) -> Result<Vec<Candidate>> {
    params.validate()?;
    let (w, h) = (img.width(), img.height());
    let q = img.inverted_quantized();
    let opened = diameter_opening(&q, w, h, params.max_diameter);

    let mut weak = vec![false; w * h];
    let mut strong = vec![false; w * h];
    for i in 0..w * h {
        let residue = f64::from(q[i]) - f64::from(opened[i]);
        weak[i] = residue >= params.threshold_low;
        strong[i] = residue >= params.threshold_high;
    }

    let comps = hysteresis_components(&weak, &strong, w, h);
    let points = comps.iter().map(|c| pixel_centroid(c, w)).collect();
    Ok(finalize_candidates(points, img))
}
