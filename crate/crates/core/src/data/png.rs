//! 8-bit PNG input and output.
//!
//! Loading keeps only the green channel, where fundus photographs carry the
//! most lesion contrast; grayscale files pass through unchanged. The field
//! of view is estimated by thresholding away the dark surround.

use std::path::Path;

use image::{ImageBuffer, Luma};

use crate::error::{Error, Result};
use crate::image::{GrayImage, IntensityRange};

fn image_error(path: &Path, err: impl std::fmt::Display) -> Error {
    Error::Image {
        path: path.display().to_string(),
        msg: err.to_string(),
    }
}

/// Load the green channel of an 8-bit RGB or grayscale image; a pixel is in
/// the field of view when its green value exceeds `fov_threshold`.
pub fn load_green_channel(path: &Path, fov_threshold: f64) -> Result<GrayImage> {
    let dynimg = image::open(path).map_err(|e| image_error(path, e))?;
    let rgb = dynimg.to_rgb8();
    let (w, h) = rgb.dimensions();
    let mut data = Vec::with_capacity((w * h) as usize);
    let mut fov = Vec::with_capacity((w * h) as usize);
    for p in rgb.pixels() {
        let g = f64::from(p.0[1]);
        data.push(g);
        fov.push(g > fov_threshold);
    }
    GrayImage::new(w as usize, h as usize, data, fov, IntensityRange::EIGHT_BIT)
}

/// Encode as an 8-bit grayscale PNG, rounding intensities to whole levels.
pub fn encode_gray_png(img: &GrayImage) -> Result<Vec<u8>> {
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_fn(img.width() as u32, img.height() as u32, |x, y| {
            let v = img.value(x as usize, y as usize).round().clamp(0.0, 255.0);
            Luma([v as u8])
        });
    let mut bytes = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut bytes, image::ImageFormat::Png)
        .map_err(|e| Error::Image {
            path: "<memory>".into(),
            msg: e.to_string(),
        })?;
    Ok(bytes.into_inner())
}

/// Write as an 8-bit grayscale PNG, rounding intensities to whole levels.
pub fn save_gray_png(path: &Path, img: &GrayImage) -> Result<()> {
    let bytes = encode_gray_png(img)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
