//! Candidate extraction by multi-scale template correlation.
//!
//! The inverted image is correlated with Gaussian templates at five scales
//! using the normalised cross-correlation coefficient, which is invariant
//! to local brightness and contrast. The per-pixel maximum over scales is
//! thresholded; connected detections that touch the segmented vessel tree
//! are discarded, and the survivors are refined by region growing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{finalize_candidates, GROW_CAP};
use crate::filter::{separable_convolve, Sat};
use crate::image::GrayImage;
use crate::preprocess::{segment_vessels, VesselSegParams};
use crate::raster::Field;
use crate::regions::{connected_components, pixel_centroid, region_grow};
use crate::types::Candidate;

const SCALE_COUNT: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZhangParams {
    /// Template standard deviations (px); exactly five scales.
    pub sigmas: Vec<f64>,
    /// Minimum correlation coefficient, in [-1, 1]. This is the strictness
    /// knob.
    pub threshold: f64,
    /// Intensity tolerance when growing the final region around a seed.
    pub grow_tolerance: f64,
    /// Settings for the vessel mask used to discard detections on vessels.
    pub vessels: VesselSegParams,
}

impl Default for ZhangParams {
    fn default() -> Self {
        ZhangParams {
            sigmas: vec![1.0, 1.25, 1.5, 1.75, 2.0],
            threshold: 0.5,
            grow_tolerance: 10.0,
            vessels: VesselSegParams::default(),
        }
    }
}

impl ZhangParams {
    pub fn validate(&self) -> Result<()> {
        if self.sigmas.len() != SCALE_COUNT {
            return Err(Error::InvalidParams(format!(
                "expected exactly {SCALE_COUNT} template scales, got {}",
                self.sigmas.len()
            )));
        }
        if self.sigmas.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(Error::InvalidParams(
                "template scales must be positive".into(),
            ));
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidParams(
                "correlation threshold must lie in (0, 1)".into(),
            ));
        }
        if !(self.grow_tolerance.is_finite() && self.grow_tolerance >= 0.0) {
            return Err(Error::InvalidParams(
                "grow_tolerance must be non-negative".into(),
            ));
        }
        self.vessels.validate()
    }
}

/// Correlation coefficient map against one Gaussian template. Border pixels
/// whose window leaves the image are left at zero.
fn ncc_scale(inv: &Field, sat: &Sat, sat_sq: &Sat, sigma: f64) -> Field {
    let (w, h) = (inv.w, inv.h);
    let half = (3.0 * sigma).ceil() as usize;
    let mut out = Field::filled(w, h, 0.0);
    if w < 2 * half + 1 || h < 2 * half + 1 {
        return out;
    }

    let kernel: Vec<f64> = (-(half as isize)..=half as isize)
        .map(|i| (-(i as f64) * (i as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let k_sum: f64 = kernel.iter().sum();
    let k_sq_sum: f64 = kernel.iter().map(|k| k * k).sum();
    let n = ((2 * half + 1) * (2 * half + 1)) as f64;
    // The 2-D template is the outer product of the 1-D kernel with itself.
    let t_sum = k_sum * k_sum;
    let t_centered_energy = k_sq_sum * k_sq_sum - t_sum * t_sum / n;

    let cross = separable_convolve(inv, &kernel);
    for y in half..h - half {
        for x in half..w - half {
            let s = sat.rect(x - half, y - half, x + half, y + half);
            let ss = sat_sq.rect(x - half, y - half, x + half, y + half);
            let var = ss - s * s / n;
            if var <= 1e-12 {
                continue;
            }
            let num = cross.get(x, y) - s * t_sum / n;
            let ncc = num / (var * t_centered_energy).sqrt();
            out.set(x, y, ncc.clamp(-1.0, 1.0));
        }
    }
    out
}

pub fn extract_zhang(img: &GrayImage, params: &ZhangParams) -> Result<Vec<Candidate>> {
    params.validate()?;
    let (w, h) = (img.width(), img.height());
    let inv = img.inverted_field();

    let sq: Vec<f64> = inv.v.iter().map(|&v| v * v).collect();
    let sat = Sat::build(&inv.v, w, h);
    let sat_sq = Sat::build(&sq, w, h);

    let mut response = Field::filled(w, h, -1.0);
    for &sigma in &params.sigmas {
        let ncc = ncc_scale(&inv, &sat, &sat_sq, sigma);
        for i in 0..w * h {
            response.v[i] = response.v[i].max(ncc.v[i]);
        }
    }

    let mask: Vec<bool> = response.v.iter().map(|&v| v >= params.threshold).collect();
    let vessels = segment_vessels(img, &params.vessels)?;

    let comps = connected_components(&mask, w, h);
    let mut points = Vec::new();
    for comp in &comps {
        if comp.iter().any(|&i| vessels[i as usize]) {
            continue;
        }
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

    #[test]
    fn finds_gaussian_blob() {
        let (w, h) = (48, 48);
        let mut data = vec![175.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let (dx, dy) = (x as f64 - 24.0, y as f64 - 22.0);
                data[y * w + x] -= 40.0 * (-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5)).exp();
            }
        }
        let img = GrayImage::with_full_fov(w, h, data, IntensityRange::EIGHT_BIT).unwrap();
        let cands = extract_zhang(&img, &ZhangParams::default()).unwrap();
        assert_eq!(cands.len(), 1, "got {cands:?}");
        assert!((cands[0].x - 24.0).abs() < 1.0 && (cands[0].y - 22.0).abs() < 1.0);
    }

    #[test]
    fn drops_detections_on_vessels() {
        // A dark line alone: any correlation hits must be discarded because
        // they sit on the segmented vessel tree.
        let (w, h) = (64, 64);
        let mut data = vec![175.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let d = y as f64 - 30.0;
                data[y * w + x] -= 60.0 * (-d * d / (2.0 * 1.8 * 1.8)).exp();
            }
        }
        let img = GrayImage::with_full_fov(w, h, data, IntensityRange::EIGHT_BIT).unwrap();
        let cands = extract_zhang(&img, &ZhangParams::default()).unwrap();
        assert!(cands.is_empty(), "vessel hits should be removed: {cands:?}");
    }

    #[test]
    fn rejects_wrong_scale_count() {
        let p = ZhangParams {
            sigmas: vec![1.0, 2.0],
            ..ZhangParams::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn correlation_is_contrast_invariant() {
        // Same blob at two contrasts: the correlation decision must agree.
        let mk = |contrast: f64| {
            let (w, h) = (40, 40);
            let mut data = vec![150.0; w * h];
            for y in 0..h {
                for x in 0..w {
                    let (dx, dy) = (x as f64 - 20.0, y as f64 - 20.0);
                    data[y * w + x] -=
                        contrast * (-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5)).exp();
                }
            }
            GrayImage::with_full_fov(w, h, data, IntensityRange::EIGHT_BIT).unwrap()
        };
        let weak = extract_zhang(&mk(12.0), &ZhangParams::default()).unwrap();
        let strong = extract_zhang(&mk(60.0), &ZhangParams::default()).unwrap();
        assert_eq!(weak.len(), 1);
        assert_eq!(strong.len(), 1);
    }
}
