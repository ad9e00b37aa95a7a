//! Polynomial gray-level transform that stretches contrast around the mean.
//!
//! The map sends the declared range endpoints to the output endpoints and the
//! FOV mean intensity to the output midpoint, following a power curve of
//! exponent `r` on each side:
//!
//! ```text
//! f <= mu:  out_min + (out_max - out_min)/2 * ((f - f_min)/(mu - f_min))^r
//! f >  mu:  out_max - (out_max - out_min)/2 * ((f_max - f)/(f_max - mu))^r
//! ```
//!
//! Both ratios lie in [0, 1], so the transform is defined for any real
//! exponent r > 0 and is monotone in f.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{GrayImage, IntensityRange};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WalterKleinParams {
    /// Power-curve exponent; 1 is piecewise linear, larger values flatten the
    /// tails and steepen the transition around the mean. Default 2.
    pub r: f64,
    /// Lower end of the output range. Default 0.
    pub out_min: f64,
    /// Upper end of the output range. Default 255.
    pub out_max: f64,
}

impl Default for WalterKleinParams {
    fn default() -> Self {
        WalterKleinParams {
            r: 2.0,
            out_min: 0.0,
            out_max: 255.0,
        }
    }
}

impl WalterKleinParams {
    pub fn validate(&self) -> Result<()> {
        if !self.r.is_finite() || self.r <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "contrast exponent r = {} must be positive",
                self.r
            )));
        }
        if !self.out_min.is_finite() || !self.out_max.is_finite() || self.out_min >= self.out_max {
            return Err(Error::InvalidParams(format!(
                "output range [{}, {}] must be an ordered pair",
                self.out_min, self.out_max
            )));
        }
        Ok(())
    }
}

/// Applies the transform pointwise. The mean is taken over the FOV; the
/// declared input range supplies the endpoints. Errors on a degenerate range
/// (constant image) or when the FOV mean coincides with an endpoint, where
/// the power curve collapses.
pub fn walter_klein(img: &GrayImage, params: &WalterKleinParams) -> Result<GrayImage> {
    params.validate()?;
    let range = img.range();
    if range.width() <= 0.0 {
        return Err(Error::DegenerateInput(
            "constant image: declared intensity range has zero width".into(),
        ));
    }
    let mu = img.mean_in_fov()?;
    if mu <= range.min || mu >= range.max {
        return Err(Error::DegenerateInput(format!(
            "FOV mean {mu} sits on the range boundary [{}, {}]",
            range.min, range.max
        )));
    }

    let out_range = IntensityRange::new(params.out_min, params.out_max)?;
    let half = 0.5 * (params.out_max - params.out_min);
    let lo_span = mu - range.min;
    let hi_span = range.max - mu;
    let data = img
        .data()
        .iter()
        .map(|&v| {
            let mapped = if v <= mu {
                params.out_min + half * ((v - range.min) / lo_span).powf(params.r)
            } else {
                params.out_max - half * ((range.max - v) / hi_span).powf(params.r)
            };
            out_range.clamp(mapped)
        })
        .collect();
    img.with_data(data, out_range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::GrayImage;
    use proptest::prelude::*;

    fn image_with_mean_128() -> GrayImage {
        // integer values summing to 640 over 5 pixels: FOV mean exactly 128
        let data = vec![64.0, 0.0, 255.0, 128.0, 193.0];
        GrayImage::with_full_fov(5, 1, data, IntensityRange::EIGHT_BIT).unwrap()
    }

    #[test]
    fn linear_case_maps_quarter_point() {
        let img = image_with_mean_128();
        let p = WalterKleinParams {
            r: 1.0,
            out_min: 0.0,
            out_max: 255.0,
        };
        let out = walter_klein(&img, &p).unwrap();
        // f = 64 with mu = 128: half-range scaled by 64/128
        assert!((out.value(0, 0) - 63.75).abs() < 1e-12);
    }

    #[test]
    fn endpoints_and_mean_hit_targets() {
        let img = image_with_mean_128();
        let p = WalterKleinParams {
            r: 2.7,
            out_min: 10.0,
            out_max: 90.0,
        };
        let out = walter_klein(&img, &p).unwrap();
        assert!((out.value(1, 0) - 10.0).abs() < 1e-12); // f_min
        assert!((out.value(2, 0) - 90.0).abs() < 1e-12); // f_max
        assert!((out.value(3, 0) - 50.0).abs() < 1e-12); // mean -> midpoint
    }

    #[test]
    fn constant_image_is_degenerate() {
        let img = GrayImage::constant(4, 4, 7.0, IntensityRange::new(7.0, 7.0).unwrap()).unwrap();
        assert!(matches!(
            walter_klein(&img, &WalterKleinParams::default()),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn mean_at_endpoint_is_degenerate() {
        let img =
            GrayImage::constant(4, 4, 0.0, IntensityRange::EIGHT_BIT).unwrap();
        assert!(matches!(
            walter_klein(&img, &WalterKleinParams::default()),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn rejects_bad_params() {
        assert!(WalterKleinParams {
            r: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(WalterKleinParams {
            r: 1.0,
            out_min: 5.0,
            out_max: 5.0,
        }
        .validate()
        .is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_intensity(
            r in 0.2f64..5.0,
            a in 0u8..=255,
            b in 0u8..=255,
        ) {
            let img = image_with_mean_128();
            let p = WalterKleinParams { r, out_min: 0.0, out_max: 255.0 };
            // map two probe values through the same transform
            let probe = |v: f64| {
                let mut data = img.data().to_vec();
                data[0] = v;
                // keep the mean fixed by moving mass onto a balance pixel
                data[4] = 193.0 + (64.0 - v);
                if !(0.0..=255.0).contains(&data[4]) { return None; }
                let probe_img = GrayImage::with_full_fov(
                    5, 1, data, IntensityRange::EIGHT_BIT).unwrap();
                Some(walter_klein(&probe_img, &p).unwrap().value(0, 0))
            };
            if let (Some(va), Some(vb)) = (probe(a as f64), probe(b as f64)) {
                if a <= b {
                    prop_assert!(va <= vb + 1e-12);
                } else {
                    prop_assert!(vb <= va + 1e-12);
                }
            }
        }
    }
}
