//! Vessel suppression: segment the vessel tree, then fill it in by isotropic
//! diffusion so line-shaped structure stops competing with small round
//! lesions.
//!
//! Segmentation runs on the inverted view (vessels bright): a white top-hat
//! against a disc opening removes slow background, a maximum over rotated
//! linear openings keeps only elongated responses, and a global percentile
//! threshold inside the FOV binarizes. A small dilation covers anti-aliased
//! vessel borders. A band along the FOV rim is excluded because the disc
//! opening is unreliable where the window leaves the FOV.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::percentile;
use crate::image::GrayImage;
use crate::morph::{dilate_mask, disc_se, max_linear_opening, open};

/// Orientation count for the linear openings; 15-degree steps.
const ORIENTATIONS: usize = 12;

/// Minimum vesselness, in gray levels, for a pixel to count as vessel. On
/// images with little or no vasculature the percentile threshold would
/// otherwise drop to the noise-level responses and mask arbitrary tissue.
const RESPONSE_FLOOR: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VesselSegParams {
    /// Length of the rotated linear element; must exceed lesion diameters so
    /// round blobs never survive the opening. Default 15.
    pub line_length: usize,
    /// Disc radius for the background opening; must exceed the vessel
    /// half-width. Default 8.
    pub disc_radius: i32,
    /// Percentile of the in-FOV response used as the global threshold.
    /// Default 95.
    pub percentile: f64,
    /// Binary dilation radius applied to the mask. Default 1.
    pub dilation: i32,
}

impl Default for VesselSegParams {
    fn default() -> Self {
        VesselSegParams {
            line_length: 15,
            disc_radius: 8,
            percentile: 95.0,
            dilation: 1,
        }
    }
}

impl VesselSegParams {
    pub fn validate(&self) -> Result<()> {
        if self.line_length < 3 {
            return Err(Error::InvalidParams(format!(
                "line length {} must be at least 3",
                self.line_length
            )));
        }
        if self.disc_radius < 1 {
            return Err(Error::InvalidParams(format!(
                "disc radius {} must be at least 1",
                self.disc_radius
            )));
        }
        if !(0.0..=100.0).contains(&self.percentile) {
            return Err(Error::InvalidParams(format!(
                "percentile {} outside [0, 100]",
                self.percentile
            )));
        }
        if self.dilation < 0 {
            return Err(Error::InvalidParams("dilation must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VesselRemovalParams {
    /// Segmentation stage settings.
    pub segmentation: VesselSegParams,
    /// Diffusion sweep cap. Default 500.
    pub max_iterations: usize,
    /// Stop when no masked pixel moves more than this per sweep.
    /// Default 1e-3.
    pub tolerance: f64,
}

impl Default for VesselRemovalParams {
    fn default() -> Self {
        VesselRemovalParams {
            segmentation: VesselSegParams::default(),
            max_iterations: 500,
            tolerance: 1e-3,
        }
    }
}

impl VesselRemovalParams {
    pub fn validate(&self) -> Result<()> {
        self.segmentation.validate()?;
        if self.max_iterations == 0 {
            return Err(Error::InvalidParams("iteration cap must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParams("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Boolean vessel mask, `true` on vessel pixels. Always a subset of the FOV.
pub fn segment_vessels(img: &GrayImage, params: &VesselSegParams) -> Result<Vec<bool>> {
    params.validate()?;
    let (w, h) = (img.width(), img.height());
    let inv = img.inverted_field();

    // background removal, then keep only line-shaped residue
    let background = open(&inv, &disc_se(params.disc_radius));
    let mut tophat = inv;
    for (v, b) in tophat.v.iter_mut().zip(background.v) {
        *v = (*v - b).max(0.0);
    }
    let response = max_linear_opening(&tophat, params.line_length, ORIENTATIONS);

    // rim exclusion: shave a band where the disc window left the FOV
    let margin = params.disc_radius + 1;
    let not_fov: Vec<bool> = img.fov().iter().map(|&m| !m).collect();
    let rim = dilate_mask(&not_fov, w, h, margin);

    let in_fov: Vec<f64> = response
        .v
        .iter()
        .zip(img.fov())
        .filter(|(_, &m)| m)
        .map(|(&v, _)| v)
        .collect();
    if in_fov.is_empty() {
        return Err(Error::DegenerateInput("empty field of view".into()));
    }
    let threshold = percentile(&in_fov, params.percentile).max(RESPONSE_FLOOR);

    let mut mask: Vec<bool> = response
        .v
        .iter()
        .enumerate()
        .map(|(i, &v)| v > threshold && !rim[i])
        .collect();
    mask = dilate_mask(&mask, w, h, params.dilation);
    for (m, &f) in mask.iter_mut().zip(img.fov()) {
        *m = *m && f;
    }
    Ok(mask)
}

/// Replaces masked pixels by iterative 4-neighbor diffusion with the
/// unmasked FOV as fixed boundary. Masked pixels start at the unmasked FOV
/// mean. Sweeps run in-place in raster order (deterministic) until converged
/// or capped.
fn inpaint(img: &GrayImage, mask: &[bool], params: &VesselRemovalParams) -> Result<Vec<f64>> {
    let (w, h) = (img.width(), img.height());
    let fov = img.fov();
    let mut boundary_sum = 0.0;
    let mut boundary_n = 0usize;
    for i in 0..mask.len() {
        if fov[i] && !mask[i] {
            boundary_sum += img.data()[i];
            boundary_n += 1;
        }
    }
    if boundary_n == 0 {
        return Err(Error::DegenerateInput(
            "vessel mask covers the entire field of view".into(),
        ));
    }
    let fill = boundary_sum / boundary_n as f64;

    let mut out = img.data().to_vec();
    let masked: Vec<u32> = (0..mask.len() as u32)
        .filter(|&i| mask[i as usize])
        .collect();
    for &i in &masked {
        out[i as usize] = fill;
    }

    for _ in 0..params.max_iterations {
        let mut worst: f64 = 0.0;
        for &i in &masked {
            let i = i as usize;
            let x = i % w;
            let y = i / w;
            let mut sum = 0.0;
            let mut n = 0usize;
            if x > 0 && fov[i - 1] {
                sum += out[i - 1];
                n += 1;
            }
            if x + 1 < w && fov[i + 1] {
                sum += out[i + 1];
                n += 1;
            }
            if y > 0 && fov[i - w] {
                sum += out[i - w];
                n += 1;
            }
            if y + 1 < h && fov[i + w] {
                sum += out[i + w];
                n += 1;
            }
            if n == 0 {
                continue; // isolated FOV pixel keeps its fill value
            }
            let next = sum / n as f64;
            worst = worst.max((next - out[i]).abs());
            out[i] = next;
        }
        if worst < params.tolerance {
            break;
        }
    }
    Ok(out)
}

/// Segments the vessel tree and diffuses it away. Pixels outside the mask
/// are returned untouched; an image with no detected vessels comes back
/// identical.
pub fn vessel_removal_inpaint(img: &GrayImage, params: &VesselRemovalParams) -> Result<GrayImage> {
    params.validate()?;
    let mask = segment_vessels(img, &params.segmentation)?;
    if mask.iter().all(|&m| !m) {
        return Ok(img.clone());
    }
    let out = inpaint(img, &mask, params)?;
    img.with_data(out, img.range())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::IntensityRange;

    fn line_image(w: usize, h: usize, bg: f64, depth: f64) -> GrayImage {
        let mut data = vec![bg; w * h];
        let y0 = h / 2;
        for x in 0..w {
            for dy in -1..=1i64 {
                let y = (y0 as i64 + dy) as usize;
                data[y * w + x] = bg - depth;
            }
        }
        GrayImage::with_full_fov(w, h, data, IntensityRange::EIGHT_BIT).unwrap()
    }

    #[test]
    fn segments_dark_line_not_background() {
        let img = line_image(64, 64, 180.0, 60.0);
        let mask = segment_vessels(&img, &VesselSegParams::default()).unwrap();
        let w = 64;
        assert!(mask[32 * w + 32], "line center must be masked");
        assert!(!mask[8 * w + 32], "background must stay unmasked");
    }

    #[test]
    fn blob_alone_is_not_a_vessel() {
        let w = 64;
        let mut data = vec![180.0; w * w];
        for y in 28..33 {
            for x in 28..33 {
                data[y * w + x] = 120.0;
            }
        }
        let img = GrayImage::with_full_fov(w, w, data, IntensityRange::EIGHT_BIT).unwrap();
        let mask = segment_vessels(&img, &VesselSegParams::default()).unwrap();
        assert!(mask.iter().all(|&m| !m), "compact blob must not be masked");
    }

    #[test]
    fn inpainting_restores_uniform_background() {
        let img = line_image(64, 64, 180.0, 60.0);
        let out = vessel_removal_inpaint(&img, &VesselRemovalParams::default()).unwrap();
        for x in 5..59 {
            let v = out.value(x, 32);
            assert!(
                (v - 180.0).abs() < 1.0,
                "line pixel ({x}, 32) inpainted to {v}, expected about 180"
            );
        }
    }

    #[test]
    fn untouched_outside_mask_and_identity_without_vessels() {
        let img = line_image(64, 64, 180.0, 60.0);
        let mask = segment_vessels(&img, &VesselSegParams::default()).unwrap();
        let out = vessel_removal_inpaint(&img, &VesselRemovalParams::default()).unwrap();
        for i in 0..mask.len() {
            if !mask[i] {
                assert_eq!(out.data()[i], img.data()[i]);
            }
        }
        let blank = GrayImage::constant(48, 48, 120.0, IntensityRange::EIGHT_BIT).unwrap();
        let same = vessel_removal_inpaint(&blank, &VesselRemovalParams::default()).unwrap();
        assert_eq!(same, blank);
    }

    #[test]
    fn full_mask_is_degenerate() {
        let img = GrayImage::constant(16, 16, 50.0, IntensityRange::EIGHT_BIT).unwrap();
        let mask = vec![true; 16 * 16];
        assert!(matches!(
            inpaint(&img, &mask, &VesselRemovalParams::default()),
            Err(Error::DegenerateInput(_))
        ));
    }
}
