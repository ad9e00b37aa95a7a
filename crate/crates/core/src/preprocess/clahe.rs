//! Contrast-limited adaptive histogram equalization.
//!
//! The image is split into a grid of tiles; each tile gets a clipped,
//! redistributed histogram whose CDF defines a tile-local gray map
//! `lut[b] = min + cdf[b] * span / tile_area` over `bins` quantization
//! levels. Pixels are remapped by bilinear interpolation between the maps of
//! the four surrounding tile centers, which removes tile seams.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClaheParams {
    /// Tile grid rows. Default 8.
    pub tile_rows: usize,
    /// Tile grid columns. Default 8.
    pub tile_cols: usize,
    /// Histogram clip limit as a multiple of the uniform bin height
    /// (tile_area / bins). Default 3.
    pub clip_limit: f64,
    /// Histogram resolution. Default 256.
    pub bins: usize,
}

impl Default for ClaheParams {
    fn default() -> Self {
        ClaheParams {
            tile_rows: 8,
            tile_cols: 8,
            clip_limit: 3.0,
            bins: 256,
        }
    }
}

impl ClaheParams {
    pub fn validate(&self) -> Result<()> {
        if self.tile_rows == 0 || self.tile_cols == 0 {
            return Err(Error::InvalidParams(
                "tile grid must have at least one row and column".into(),
            ));
        }
        if !self.clip_limit.is_finite() || self.clip_limit < 1.0 {
            return Err(Error::InvalidParams(format!(
                "clip limit {} must be at least 1 uniform bin height",
                self.clip_limit
            )));
        }
        if self.bins < 2 || self.bins > 1 << 16 {
            return Err(Error::InvalidParams(format!(
                "bins = {} out of supported range", self.bins
            )));
        }
        Ok(())
    }
}

/// Reflected index for padding (mirror around the last pixel).
fn reflect(i: usize, n: usize) -> usize {
    if i < n {
        i
    } else if n == 1 {
        0
    } else {
        2 * (n - 1) - i
    }
}

pub fn clahe(img: &GrayImage, params: &ClaheParams) -> Result<GrayImage> {
    params.validate()?;
    let (w, h) = (img.width(), img.height());
    if w < params.tile_cols || h < params.tile_rows {
        return Err(Error::InvalidParams(format!(
            "{w}x{h} image smaller than the {}x{} tile grid",
            params.tile_cols, params.tile_rows
        )));
    }
    let range = img.range();
    let span = range.width();
    if span <= 0.0 {
        // a constant image has nothing to equalize
        return Ok(img.clone());
    }

    let bins = params.bins;
    let cols = params.tile_cols;
    let rows = params.tile_rows;
    let tile_w = w.div_ceil(cols);
    let tile_h = h.div_ceil(rows);
    let pw = tile_w * cols;
    let ph = tile_h * rows;

    // quantize the padded image once
    let scale_q = bins as f64 / span;
    let mut q = vec![0u32; pw * ph];
    for y in 0..ph {
        let sy = reflect(y, h);
        for x in 0..pw {
            let sx = reflect(x, w);
            let b = ((img.value(sx, sy) - range.min) * scale_q) as usize;
            q[y * pw + x] = b.min(bins - 1) as u32;
        }
    }

    let tile_area = tile_w * tile_h;
    let clip = (params.clip_limit * tile_area as f64 / bins as f64).max(1.0) as u64;

    // one gray map per tile
    let mut luts = vec![0.0f64; rows * cols * bins];
    let mut hist = vec![0u64; bins];
    for ty in 0..rows {
        for tx in 0..cols {
            hist.iter_mut().for_each(|v| *v = 0);
            for y in ty * tile_h..(ty + 1) * tile_h {
                for x in tx * tile_w..(tx + 1) * tile_w {
                    hist[q[y * pw + x] as usize] += 1;
                }
            }
            // clip and redistribute the excess uniformly, remainder spread
            // over evenly spaced bins
            let mut excess = 0u64;
            for v in hist.iter_mut() {
                if *v > clip {
                    excess += *v - clip;
                    *v = clip;
                }
            }
            let add = excess / bins as u64;
            let mut rem = (excess % bins as u64) as usize;
            for v in hist.iter_mut() {
                *v += add;
            }
            if rem > 0 {
                let step = bins / rem.max(1);
                let mut i = 0;
                while rem > 0 && i < bins {
                    hist[i] += 1;
                    rem -= 1;
                    i += step.max(1);
                }
                // any leftover lands on the first bins
                let mut j = 0;
                while rem > 0 {
                    hist[j] += 1;
                    rem -= 1;
                    j += 1;
                }
            }
            let lut = &mut luts[(ty * cols + tx) * bins..(ty * cols + tx + 1) * bins];
            let scale = span / tile_area as f64;
            let mut cdf = 0u64;
            for (b, &count) in hist.iter().enumerate() {
                cdf += count;
                lut[b] = range.min + cdf as f64 * scale;
            }
        }
    }

    // bilinear blend of the four surrounding tile maps, on original pixels
    let mut out = vec![0.0f64; w * h];
    for y in 0..h {
        let fy = (y as f64 + 0.5) / tile_h as f64 - 0.5;
        let ty0 = fy.floor();
        let wy = fy - ty0;
        let r0 = (ty0 as isize).clamp(0, rows as isize - 1) as usize;
        let r1 = (ty0 as isize + 1).clamp(0, rows as isize - 1) as usize;
        for x in 0..w {
            let fx = (x as f64 + 0.5) / tile_w as f64 - 0.5;
            let tx0 = fx.floor();
            let wx = fx - tx0;
            let c0 = (tx0 as isize).clamp(0, cols as isize - 1) as usize;
            let c1 = (tx0 as isize + 1).clamp(0, cols as isize - 1) as usize;
            let b = q[y * pw + x] as usize;
            let v00 = luts[(r0 * cols + c0) * bins + b];
            let v10 = luts[(r0 * cols + c1) * bins + b];
            let v01 = luts[(r1 * cols + c0) * bins + b];
            let v11 = luts[(r1 * cols + c1) * bins + b];
            let top = v00 + (v10 - v00) * wx;
            let bot = v01 + (v11 - v01) * wx;
            out[y * w + x] = range.clamp(top + (bot - top) * wy);
        }
    }
    img.with_data(out, range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::IntensityRange;

    #[test]
    fn constant_image_stays_constant_and_near_identity() {
        // A constant fills one histogram bin per tile; clipping spreads the
        // excess across all bins, which makes the gray map a near-identity
        // ramp. The output must stay exactly constant and may drift only by
        // the remainder-spreading granularity (a few gray levels).
        let img = GrayImage::constant(128, 128, 97.0, IntensityRange::EIGHT_BIT).unwrap();
        let params = ClaheParams {
            tile_rows: 4,
            tile_cols: 4,
            ..ClaheParams::default()
        };
        let out = clahe(&img, &params).unwrap();
        for &v in out.data() {
            assert!((v - 97.0).abs() <= 5.0, "constant drifted to {v}");
        }
        // and the output is itself constant
        let first = out.data()[0];
        assert!(out.data().iter().all(|&v| (v - first).abs() < 1e-12));
    }

    #[test]
    fn single_tile_matches_plain_histogram_equalization() {
        // two-level image, one tile, clip high enough to never trigger
        let w = 32;
        let h = 16;
        let mut data = vec![60.0; w * h];
        for i in 0..w * h / 4 {
            data[i * 4] = 190.0;
        }
        let img = GrayImage::with_full_fov(w, h, data.clone(), IntensityRange::EIGHT_BIT).unwrap();
        let params = ClaheParams {
            tile_rows: 1,
            tile_cols: 1,
            clip_limit: 256.0,
            bins: 256,
        };
        let out = clahe(&img, &params).unwrap();

        // plain equalization oracle with the same binning convention
        let bin = |v: f64| ((v / 255.0) * 256.0).min(255.0) as usize;
        let mut hist = [0u64; 256];
        for &v in &data {
            hist[bin(v)] += 1;
        }
        let mut cdf = [0u64; 256];
        let mut acc = 0;
        for b in 0..256 {
            acc += hist[b];
            cdf[b] = acc;
        }
        let area = (w * h) as f64;
        for (i, &v) in data.iter().enumerate() {
            let expect = cdf[bin(v)] as f64 * 255.0 / area;
            assert!(
                (out.data()[i] - expect).abs() < 1e-9,
                "pixel {i}: {} vs {}",
                out.data()[i],
                expect
            );
        }
    }

    #[test]
    fn checkerboard_maps_to_equalized_levels_in_every_tile() {
        let w = 64;
        let h = 64;
        let mut data = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                data[y * w + x] = if (x + y) % 2 == 0 { 100.0 } else { 140.0 };
            }
        }
        let img = GrayImage::with_full_fov(w, h, data, IntensityRange::EIGHT_BIT).unwrap();
        let params = ClaheParams {
            tile_rows: 2,
            tile_cols: 2,
            clip_limit: 256.0,
            bins: 256,
        };
        let out = clahe(&img, &params).unwrap();
        // Every tile holds a 50/50 split of the two levels, so each tile's
        // map sends the lower level to half the cumulative mass (min +
        // span/2) and the upper level to the top of the range; identical
        // tile histograms make the interpolation exact everywhere.
        for y in 0..h {
            for x in 0..w {
                let expect = if (x + y) % 2 == 0 { 127.5 } else { 255.0 };
                let got = out.value(x, y);
                assert!(
                    (got - expect).abs() < 1e-9,
                    "pixel ({x},{y}): {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn output_stays_in_declared_range() {
        let w = 40;
        let h = 40;
        let data: Vec<f64> = (0..w * h).map(|i| (i * 37 % 256) as f64).collect();
        let img = GrayImage::with_full_fov(w, h, data, IntensityRange::EIGHT_BIT).unwrap();
        let out = clahe(&img, &ClaheParams::default()).unwrap();
        assert_eq!(out.range(), IntensityRange::EIGHT_BIT);
        for &v in out.data() {
            assert!((0.0..=255.0).contains(&v));
        }
    }

    #[test]
    fn image_smaller_than_grid_is_rejected() {
        let img = GrayImage::constant(4, 4, 10.0, IntensityRange::EIGHT_BIT).unwrap();
        assert!(clahe(&img, &ClaheParams::default()).is_err());
    }
}
