//! Linear filtering helpers: separable Gaussian smoothing, Sobel gradients,
//! summed-area tables for windowed statistics, and percentiles.

use crate::raster::Field;

/// Normalized 1-D Gaussian taps, truncated at 3 sigma.
pub(crate) fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    assert!(sigma > 0.0, "sigma must be positive");
    let half = (3.0 * sigma).ceil() as i64;
    let inv = -0.5 / (sigma * sigma);
    let mut k: Vec<f64> = (-half..=half)
        .map(|i| ((i * i) as f64 * inv).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    for v in &mut k {
        *v /= sum;
    }
    k
}

fn convolve_rows(f: &Field, kernel: &[f64]) -> Field {
    let half = (kernel.len() / 2) as isize;
    let mut out = Field::filled(f.w, f.h, 0.0);
    for y in 0..f.h {
        for x in 0..f.w {
            let mut acc = 0.0;
            for (t, &k) in kernel.iter().enumerate() {
                acc += k * f.get_clamped(x as isize + t as isize - half, y as isize);
            }
            out.set(x, y, acc);
        }
    }
    out
}

fn convolve_cols(f: &Field, kernel: &[f64]) -> Field {
    let half = (kernel.len() / 2) as isize;
    let mut out = Field::filled(f.w, f.h, 0.0);
    for y in 0..f.h {
        for x in 0..f.w {
            let mut acc = 0.0;
            for (t, &k) in kernel.iter().enumerate() {
                acc += k * f.get_clamped(x as isize, y as isize + t as isize - half);
            }
            out.set(x, y, acc);
        }
    }
    out
}

/// Separable Gaussian blur with replicated borders.
pub(crate) fn gaussian_blur(f: &Field, sigma: f64) -> Field {
    let k = gaussian_kernel(sigma);
    convolve_cols(&convolve_rows(f, &k), &k)
}

/// Separable convolution with an arbitrary (possibly unnormalized) kernel,
/// used for template cross-terms in normalized correlation.
pub(crate) fn separable_convolve(f: &Field, kernel: &[f64]) -> Field {
    convolve_cols(&convolve_rows(f, kernel), kernel)
}

/// Sobel x/y gradients scaled to gray-levels per pixel.
pub(crate) fn sobel(f: &Field) -> (Field, Field) {
    let mut gx = Field::filled(f.w, f.h, 0.0);
    let mut gy = Field::filled(f.w, f.h, 0.0);
    for y in 0..f.h {
        for x in 0..f.w {
            let xi = x as isize;
            let yi = y as isize;
            let p = |dx: isize, dy: isize| f.get_clamped(xi + dx, yi + dy);
            let sx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1))
                - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            let sy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1))
                - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
            gx.set(x, y, sx / 8.0);
            gy.set(x, y, sy / 8.0);
        }
    }
    (gx, gy)
}

/// Summed-area table over an arbitrary value buffer; supports O(1) window
/// sums with inclusive pixel rectangles.
pub(crate) struct Sat {
    w: usize,
    s: Vec<f64>,
}

impl Sat {
    pub fn build(values: &[f64], w: usize, h: usize) -> Self {
        assert_eq!(values.len(), w * h);
        let sw = w + 1;
        let mut s = vec![0.0; sw * (h + 1)];
        for y in 0..h {
            let mut row = 0.0;
            for x in 0..w {
                row += values[y * w + x];
                s[(y + 1) * sw + (x + 1)] = s[y * sw + (x + 1)] + row;
            }
        }
        Sat { w, s }
    }

    /// Sum over pixels with x in [x0, x1] and y in [y0, y1], inclusive.
    pub fn rect(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> f64 {
        debug_assert!(x0 <= x1 && y0 <= y1);
        let sw = self.w + 1;
        self.s[(y1 + 1) * sw + (x1 + 1)] + self.s[y0 * sw + x0]
            - self.s[y0 * sw + (x1 + 1)]
            - self.s[(y1 + 1) * sw + x0]
    }
}

/// Linear-interpolated percentile, p in [0, 100]. Sorts a copy.
pub(crate) fn percentile(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty());
    assert!((0.0..=100.0).contains(&p));
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = p / 100.0 * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        v[lo]
    } else {
        let t = pos - lo as f64;
        v[lo] + (v[hi] - v[lo]) * t
    }
}
