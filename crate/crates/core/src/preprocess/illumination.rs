//! Local illumination equalization: each FOV pixel is shifted by the gap
//! between a desired mean and the mean of its surrounding window, flattening
//! slow brightness drift (vignetting) without touching local contrast.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IlluminationEqParams {
    /// Target local mean; must lie inside the image's declared range.
    /// Default 128.
    pub desired_mean: f64,
    /// Square window side in pixels, odd and >= 3. `None` derives it from the
    /// image as width/8 rounded up to odd. Default `None`.
    pub window: Option<usize>,
}

impl Default for IlluminationEqParams {
    fn default() -> Self {
        IlluminationEqParams {
            desired_mean: 128.0,
            window: None,
        }
    }
}

impl IlluminationEqParams {
    pub fn validate(&self) -> Result<()> {
        if !self.desired_mean.is_finite() {
            return Err(Error::InvalidParams("desired mean must be finite".into()));
        }
        if let Some(w) = self.window {
            if w < 3 || w % 2 == 0 {
                return Err(Error::InvalidParams(format!(
                    "window {w} must be odd and at least 3"
                )));
            }
        }
        Ok(())
    }
}

fn auto_window(width: usize) -> usize {
    let w = (width / 8).max(3);
    if w % 2 == 0 {
        w + 1
    } else {
        w
    }
}

/// Shifts every FOV pixel by `desired_mean - local_mean`, where the local
/// mean is taken over the FOV part of the window, and clamps to the declared
/// range. Surround pixels pass through unchanged.
///
/// The local mean is evaluated as `center + mean(neighbor - center)`: on a
/// constant patch all deviations are exactly zero, so constant FOV regions
/// land bit-exactly on `desired_mean`.
pub fn illumination_equalize(img: &GrayImage, params: &IlluminationEqParams) -> Result<GrayImage> {
    params.validate()?;
    let range = img.range();
    if params.desired_mean < range.min || params.desired_mean > range.max {
        return Err(Error::InvalidParams(format!(
            "desired mean {} outside declared range [{}, {}]",
            params.desired_mean, range.min, range.max
        )));
    }
    let w = img.width();
    let h = img.height();
    let window = params.window.unwrap_or_else(|| auto_window(w));
    if window < 3 || window % 2 == 0 {
        return Err(Error::InvalidParams(format!(
            "derived window {window} must be odd and at least 3"
        )));
    }
    let half = (window / 2) as i64;
    let data = img.data();
    let fov = img.fov();

    let mut out = data.to_vec();
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let y = y as i64;
        for x in 0..w {
            if !fov[y as usize * w + x] {
                continue;
            }
            let center = data[y as usize * w + x];
            let mut dev_sum = 0.0;
            let mut count = 0usize;
            let y0 = (y - half).max(0);
            let y1 = (y + half).min(h as i64 - 1);
            let x0 = (x as i64 - half).max(0) as usize;
            let x1 = (x as i64 + half).min(w as i64 - 1) as usize;
            for wy in y0..=y1 {
                let base = wy as usize * w;
                for wx in x0..=x1 {
                    if fov[base + wx] {
                        dev_sum += data[base + wx] - center;
                        count += 1;
                    }
                }
            }
            // local_mean = center + dev_sum/count, so the shifted value
            // f + desired - local_mean reduces to desired - dev_mean
            row[x] = range.clamp(params.desired_mean - dev_sum / count as f64);
        }
    });

    img.with_data(out, range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::IntensityRange;

    #[test]
    fn constant_image_maps_exactly_to_desired_mean() {
        let img = GrayImage::constant(40, 40, 77.3, IntensityRange::EIGHT_BIT).unwrap();
        let p = IlluminationEqParams {
            desired_mean: 131.7,
            window: Some(9),
        };
        let out = illumination_equalize(&img, &p).unwrap();
        for &v in out.data() {
            assert_eq!(v, 131.7); // bit-exact
        }
    }

    #[test]
    fn surround_pixels_pass_through() {
        let w = 10;
        let h = 10;
        let mut fov = vec![true; w * h];
        for x in 0..w {
            fov[x] = false; // first row is surround
        }
        let data = vec![50.0; w * h];
        let img = GrayImage::new(w, h, data, fov, IntensityRange::EIGHT_BIT).unwrap();
        let p = IlluminationEqParams {
            desired_mean: 100.0,
            window: Some(5),
        };
        let out = illumination_equalize(&img, &p).unwrap();
        for x in 0..w {
            assert_eq!(out.value(x, 0), 50.0);
        }
        assert_eq!(out.value(3, 5), 100.0);
    }

    #[test]
    fn flattens_linear_shading() {
        let w = 64;
        let h = 16;
        let data: Vec<f64> = (0..w * h).map(|i| 60.0 + (i % w) as f64).collect();
        let img = GrayImage::with_full_fov(w, h, data, IntensityRange::EIGHT_BIT).unwrap();
        let p = IlluminationEqParams {
            desired_mean: 128.0,
            window: Some(9),
        };
        let out = illumination_equalize(&img, &p).unwrap();
        // interior pixels of a linear ramp see a symmetric window: exactly flat
        for x in 8..w - 8 {
            assert!((out.value(x, 8) - 128.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_even_window_and_out_of_range_mean() {
        let img = GrayImage::constant(16, 16, 10.0, IntensityRange::EIGHT_BIT).unwrap();
        let bad_window = IlluminationEqParams {
            desired_mean: 100.0,
            window: Some(8),
        };
        assert!(illumination_equalize(&img, &bad_window).is_err());
        let bad_mean = IlluminationEqParams {
            desired_mean: 300.0,
            window: Some(9),
        };
        assert!(illumination_equalize(&img, &bad_mean).is_err());
    }
}
