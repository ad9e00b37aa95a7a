//! Candidate extraction by vasculature suppression and matched filtering.
//!
//! The maximum of linear openings over twelve orientations reproduces every
//! structure that contains a straight segment of the probe length, which
//! keeps vessels and erases compact blobs. Subtracting it leaves a residual
//! in which lesions are isolated bumps; a Gaussian matched filter then
//! favours bumps of lesion scale before thresholding. Each detection is
//! refined by growing a region over the inverted intensities from the
//! brightest residual pixel and taking the grown region's centroid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{finalize_candidates, GROW_CAP};
use crate::filter::gaussian_blur;
use crate::image::GrayImage;
use crate::morph::max_linear_opening;
use crate::regions::{connected_components, pixel_centroid, region_grow};
use crate::types::Candidate;

const ORIENTATIONS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpencerParams {
    /// Length (px) of the linear structuring element; vessels must contain a
    /// straight run of at least this length to be suppressed.
    pub line_length: usize,
    /// Standard deviation of the Gaussian matched filter (px).
    pub sigma: f64,
    /// Threshold on the matched-filter response. This is the strictness
    /// knob.
    pub threshold: f64,
    /// Intensity tolerance when growing the final region around a seed.
    pub grow_tolerance: f64,
}

impl Default for SpencerParams {
    fn default() -> Self {
        SpencerParams {
            line_length: 11,
            sigma: 1.5,
            threshold: 5.0,
            grow_tolerance: 10.0,
        }
    }
}

impl SpencerParams {
    pub fn validate(&self) -> Result<()> {
        if self.line_length < 3 {
            return Err(Error::InvalidParams(
                "line_length must be at least 3 px".into(),
            ));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidParams("sigma must be positive".into()));
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::InvalidParams("threshold must be positive".into()));
        }
        if !(self.grow_tolerance.is_finite() && self.grow_tolerance >= 0.0) {
            return Err(Error::InvalidParams(
                "grow_tolerance must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

pub fn extract_spencer(img: &GrayImage, params: &SpencerParams) -> Result<Vec<Candidate>> {
    params.validate()?;
    let (w, h) = (img.width(), img.height());
    let inv = img.inverted_field();
    let vascular = max_linear_opening(&inv, params.line_length, ORIENTATIONS);

    let mut residual = inv.clone();
    for i in 0..w * h {
        residual.v[i] = (inv.v[i] - vascular.v[i]).max(0.0);
    }
    let matched = gaussian_blur(&residual, params.sigma);

    let mask: Vec<bool> = matched.v.iter().map(|&v| v >= params.threshold).collect();
    let comps = connected_components(&mask, w, h);

    let mut points = Vec::with_capacity(comps.len());
    for comp in &comps {
        // Seed at the strongest inverted intensity so growth starts on the
        // lesion core rather than a skirt pixel.
        let seed = comp
            .iter()
            .copied()
            .max_by(|&a, &b| {
                inv.v[a as usize]
                    .partial_cmp(&inv.v[b as usize])
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .expect("components are non-empty");
        let region = region_grow(&inv, seed, params.grow_tolerance, GROW_CAP);
        points.push(pixel_centroid(&region, w));
    }
    Ok(finalize_candidates(points, img))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{GrayImage, IntensityRange};

    fn scene() -> GrayImage {
        let (w, h) = (48, 40);
        let mut data = vec![180.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let (dx, dy) = (x as f64 - 30.0, y as f64 - 12.0);
                data[y * w + x] -= 45.0 * (-(dx * dx + dy * dy) / (2.0 * 2.0 * 2.0)).exp();
                let v = y as f64 - 28.0;
                data[y * w + x] -= 55.0 * (-v * v / (2.0 * 1.5 * 1.5)).exp();
            }
        }
        GrayImage::with_full_fov(w, h, data, IntensityRange::EIGHT_BIT).unwrap()
    }

    #[test]
    fn finds_blob_and_ignores_vessel() {
        let img = scene();
        let cands = extract_spencer(&img, &SpencerParams::default()).unwrap();
        assert_eq!(cands.len(), 1, "expected one candidate, got {cands:?}");
        assert!((cands[0].x - 30.0).abs() < 1.0 && (cands[0].y - 12.0).abs() < 1.0);
    }

    #[test]
    fn centroid_comes_from_grown_region() {
        // An asymmetric blob: the grown region should still centre near the
        // core because growth is bounded by the intensity tolerance.
        let (w, h) = (32, 32);
        let mut data = vec![200.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let (dx, dy) = (x as f64 - 16.0, y as f64 - 16.0);
                data[y * w + x] -= 60.0 * (-(dx * dx + dy * dy) / (2.0 * 1.6 * 1.6)).exp();
            }
        }
        let img = GrayImage::with_full_fov(w, h, data, IntensityRange::EIGHT_BIT).unwrap();
        let cands = extract_spencer(&img, &SpencerParams::default()).unwrap();
        assert_eq!(cands.len(), 1);
        assert!((cands[0].x - 16.0).abs() < 0.5 && (cands[0].y - 16.0).abs() < 0.5);
    }

    #[test]
    fn rejects_bad_params() {
        let p = SpencerParams {
            sigma: 0.0,
            ..SpencerParams::default()
        };
        assert!(p.validate().is_err());
        let p = SpencerParams {
            line_length: 2,
            ..SpencerParams::default()
        };
        assert!(p.validate().is_err());
    }
}
