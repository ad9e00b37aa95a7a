//! Grayscale raster with a field-of-view mask and a declared intensity range.
//!
//! All pipeline stages exchange this type. Intensities are `f64`; operations
//! that need an 8-bit view quantize explicitly against the declared range.

use crate::error::{Error, Result};
use crate::raster::Field;

/// Declared intensity range of a [`GrayImage`]. Every pixel value lies in
/// `[min, max]`. Loaded 8-bit images use `[0, 255]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensityRange {
    pub min: f64,
    pub max: f64,
}

impl IntensityRange {
    pub const EIGHT_BIT: IntensityRange = IntensityRange {
        min: 0.0,
        max: 255.0,
    };

    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() || min > max {
            return Err(Error::InvalidParams(format!(
                "intensity range [{min}, {max}] is not an ordered finite pair"
            )));
        }
        Ok(IntensityRange { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.min, self.max)
    }
}

/// Row-major grayscale image. The FOV mask marks pixels that belong to the
/// imaged field (the circular retina area on fundus photographs); pixels
/// outside it are surround and carry no signal.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
    fov: Vec<bool>,
    range: IntensityRange,
}

impl GrayImage {
    /// Builds an image after checking the structural invariants: matching
    /// buffer lengths and every intensity finite and inside `range`.
    pub fn new(
        width: usize,
        height: usize,
        data: Vec<f64>,
        fov: Vec<bool>,
        range: IntensityRange,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParams(format!(
                "image dimensions {width}x{height} must be positive"
            )));
        }
        let n = width * height;
        if data.len() != n {
            return Err(Error::InvalidParams(format!(
                "data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        if fov.len() != n {
            return Err(Error::InvalidParams(format!(
                "fov mask length {} does not match {width}x{height}",
                fov.len()
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            if !v.is_finite() || v < range.min || v > range.max {
                return Err(Error::InvalidParams(format!(
                    "intensity {v} at pixel {} outside declared range [{}, {}]",
                    i, range.min, range.max
                )));
            }
        }
        Ok(GrayImage {
            width,
            height,
            data,
            fov,
            range,
        })
    }

    /// Image whose FOV covers every pixel.
    pub fn with_full_fov(
        width: usize,
        height: usize,
        data: Vec<f64>,
        range: IntensityRange,
    ) -> Result<Self> {
        let fov = vec![true; width * height];
        GrayImage::new(width, height, data, fov, range)
    }

    pub fn constant(width: usize, height: usize, value: f64, range: IntensityRange) -> Result<Self> {
        GrayImage::with_full_fov(width, height, vec![value; width * height], range)
    }

    /// Same dimensions and FOV as `self`, new pixel data and range.
    pub fn with_data(&self, data: Vec<f64>, range: IntensityRange) -> Result<Self> {
        GrayImage::new(self.width, self.height, data, self.fov.clone(), range)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn range(&self) -> IntensityRange {
        self.range
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn fov(&self) -> &[bool] {
        &self.fov
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y * self.width + x
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.data[self.index(x, y)]
    }

    #[inline]
    pub fn in_fov(&self, x: usize, y: usize) -> bool {
        self.fov[self.index(x, y)]
    }

    pub fn fov_count(&self) -> usize {
        self.fov.iter().filter(|&&m| m).count()
    }

    /// Mean intensity over the FOV. Errors when the mask is empty.
    pub fn mean_in_fov(&self) -> Result<f64> {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (v, &m) in self.data.iter().zip(&self.fov) {
            if m {
                sum += v;
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::DegenerateInput("empty field of view".into()));
        }
        Ok(sum / count as f64)
    }

    /// Working view for detection: intensities flipped so dark lesions become
    /// bright maxima, surround pixels forced to 0 so they never form structure.
    pub(crate) fn inverted_field(&self) -> Field {
        let mut v = vec![0.0; self.data.len()];
        for i in 0..self.data.len() {
            if self.fov[i] {
                v[i] = self.range.max - self.data[i];
            }
        }
        Field {
            w: self.width,
            h: self.height,
            v,
        }
    }

    /// 8-bit quantization of the inverted view against the declared range.
    pub(crate) fn inverted_quantized(&self) -> Vec<u8> {
        let span = self.range.width();
        let scale = if span > 0.0 { 255.0 / span } else { 0.0 };
        let inv = self.inverted_field();
        inv.v
            .iter()
            .map(|&v| (v * scale).round().clamp(0.0, 255.0) as u8)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_buffers() {
        let r = IntensityRange::EIGHT_BIT;
        assert!(GrayImage::new(4, 4, vec![0.0; 15], vec![true; 16], r).is_err());
        assert!(GrayImage::new(4, 4, vec![0.0; 16], vec![true; 15], r).is_err());
        assert!(GrayImage::new(0, 4, vec![], vec![], r).is_err());
    }

    #[test]
    fn rejects_out_of_range_intensity() {
        let r = IntensityRange::new(0.0, 100.0).unwrap();
        assert!(GrayImage::with_full_fov(2, 2, vec![0.0, 50.0, 100.0, 100.5], r).is_err());
        assert!(GrayImage::with_full_fov(2, 2, vec![0.0, 50.0, f64::NAN, 1.0], r).is_err());
    }

    #[test]
    fn mean_respects_fov() {
        let r = IntensityRange::EIGHT_BIT;
        let data = vec![10.0, 20.0, 30.0, 200.0];
        let fov = vec![true, true, true, false];
        let img = GrayImage::new(2, 2, data, fov, r).unwrap();
        assert_eq!(img.mean_in_fov().unwrap(), 20.0);
    }

    #[test]
    fn mean_on_empty_fov_errors() {
        let r = IntensityRange::EIGHT_BIT;
        let img = GrayImage::new(2, 2, vec![1.0; 4], vec![false; 4], r).unwrap();
        assert!(img.mean_in_fov().is_err());
    }

    #[test]
    fn inverted_field_zeroes_surround() {
        let r = IntensityRange::EIGHT_BIT;
        let img = GrayImage::new(
            2,
            1,
            vec![55.0, 55.0],
            vec![true, false],
            r,
        )
        .unwrap();
        let inv = img.inverted_field();
        assert_eq!(inv.v, vec![200.0, 0.0]);
    }
}
