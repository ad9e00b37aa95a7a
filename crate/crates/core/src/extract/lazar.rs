//! Candidate extraction by rotating cross-section profile analysis.
//!
//! Around every pixel, intensity profiles are sampled along a set of
//! directions. A lesion is a peak in every direction: tall relative to the
//! deepest escape level on each side, and narrow at half its height. An
//! elongated structure always offers one near-aligned direction whose
//! profile is either flat (no height) or wide (fails the width gate), so
//! the per-pixel score, the minimum gated height over all directions,
//! suppresses it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::finalize_candidates;
use crate::filter::gaussian_blur;
use crate::image::GrayImage;
use crate::regions::{connected_components, pixel_centroid};
use crate::types::Candidate;

/// Pre-smoothing that keeps single-pixel noise from reading as peaks.
const SMOOTH_SIGMA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LazarParams {
    /// Profile length (px), odd; half of it extends to each side.
    pub profile_length: usize,
    /// Number of sampled directions over a half turn.
    pub orientations: usize,
    /// Minimum gated peak height for a pixel to enter the score map. This
    /// is the strictness knob.
    pub threshold: f64,
}

impl Default for LazarParams {
    fn default() -> Self {
        LazarParams {
            profile_length: 15,
            orientations: 8,
            threshold: 6.0,
        }
    }
}

impl LazarParams {
    pub fn validate(&self) -> Result<()> {
        if self.profile_length < 5 || self.profile_length % 2 == 0 {
            return Err(Error::InvalidParams(
                "profile_length must be odd and at least 5".into(),
            ));
        }
        if self.orientations < 4 {
            return Err(Error::InvalidParams(
                "need at least 4 orientations".into(),
            ));
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::InvalidParams("threshold must be positive".into()));
        }
        Ok(())
    }
}

pub fn extract_lazar(img: &GrayImage, params: &LazarParams) -> Result<Vec<Candidate>> {
    params.validate()?;
    let (w, h) = (img.width(), img.height());
    let smoothed = gaussian_blur(&img.inverted_field(), SMOOTH_SIGMA);

    let half = (params.profile_length - 1) / 2;
    // Total half-height width a peak may span before it reads as a ridge
    // profile rather than a lesion.
    let width_limit = half + 1;
    let dirs: Vec<(f64, f64)> = (0..params.orientations)
        .map(|k| {
            let theta = k as f64 * std::f64::consts::PI / params.orientations as f64;
            (theta.cos(), theta.sin())
        })
        .collect();

    let mut mask = vec![false; w * h];
    let mut left = vec![0.0f64; half];
    let mut right = vec![0.0f64; half];
    for y in 0..h {
        for x in 0..w {
            if !img.in_fov(x, y) {
                continue;
            }
            let v = smoothed.get(x, y);
            let mut score = f64::INFINITY;
            for &(dx, dy) in &dirs {
                for t in 1..=half {
                    let tf = t as f64;
                    left[t - 1] = smoothed.bilinear(x as f64 - tf * dx, y as f64 - tf * dy);
                    right[t - 1] = smoothed.bilinear(x as f64 + tf * dx, y as f64 + tf * dy);
                }
                let lmin = left.iter().cloned().fold(f64::INFINITY, f64::min);
                let rmin = right.iter().cloned().fold(f64::INFINITY, f64::min);
                let height = v - lmin.max(rmin);
                if height <= 0.0 {
                    score = 0.0;
                    break;
                }
                let level = v - height / 2.0;
                let wl = left.iter().position(|&s| s <= level).unwrap() + 1;
                let wr = right.iter().position(|&s| s <= level).unwrap() + 1;
                if wl + wr > width_limit {
                    score = 0.0;
                    break;
                }
                score = score.min(height);
            }
            mask[y * w + x] = score >= params.threshold;
        }
    }

    let comps = connected_components(&mask, w, h);
    let points = comps.iter().map(|c| pixel_centroid(c, w)).collect();
    Ok(finalize_candidates(points, img))
}
