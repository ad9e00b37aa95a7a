//! Image conditioning applied ahead of candidate extraction.
//!
//! Five interchangeable operators, all `GrayImage -> GrayImage` with
//! dimensions, FOV mask, and declared range preserved or re-declared:
//! polynomial contrast stretching, contrast-limited adaptive histogram
//! equalization, vessel removal with diffusion inpainting, local illumination
//! equalization, and the identity.

mod clahe;
mod illumination;
mod vessel;
mod walter_klein;

pub use clahe::{clahe, ClaheParams};
pub use illumination::{illumination_equalize, IlluminationEqParams};
pub use vessel::{segment_vessels, vessel_removal_inpaint, VesselRemovalParams, VesselSegParams};
pub use walter_klein::{walter_klein, WalterKleinParams};

use crate::detector::PreprocessingId;
use crate::error::Result;
use crate::image::GrayImage;

/// Identity pass-through for the no-preprocessing arm of a detector pair.
pub fn no_preprocessing(img: &GrayImage) -> Result<GrayImage> {
    Ok(img.clone())
}

/// A preprocessing method bound to its parameters. Constructing a variant is
/// the only way to name a method, so parameters can never be missing.
#[derive(Debug, Clone, PartialEq)]
pub enum PreprocessingOp {
    WalterKlein(WalterKleinParams),
    Clahe(ClaheParams),
    VesselRemoval(VesselRemovalParams),
    IlluminationEq(IlluminationEqParams),
    None,
}

impl PreprocessingOp {
    pub fn id(&self) -> PreprocessingId {
        match self {
            PreprocessingOp::WalterKlein(_) => PreprocessingId::WalterKlein,
            PreprocessingOp::Clahe(_) => PreprocessingId::Clahe,
            PreprocessingOp::VesselRemoval(_) => PreprocessingId::VesselRemoval,
            PreprocessingOp::IlluminationEq(_) => PreprocessingId::IlluminationEq,
            PreprocessingOp::None => PreprocessingId::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PreprocessingOp::WalterKlein(p) => p.validate(),
            PreprocessingOp::Clahe(p) => p.validate(),
            PreprocessingOp::VesselRemoval(p) => p.validate(),
            PreprocessingOp::IlluminationEq(p) => p.validate(),
            PreprocessingOp::None => Ok(()),
        }
    }

    pub fn run(&self, img: &GrayImage) -> Result<GrayImage> {
        match self {
            PreprocessingOp::WalterKlein(p) => walter_klein(img, p),
            PreprocessingOp::Clahe(p) => clahe(img, p),
            PreprocessingOp::VesselRemoval(p) => vessel_removal_inpaint(img, p),
            PreprocessingOp::IlluminationEq(p) => illumination_equalize(img, p),
            PreprocessingOp::None => no_preprocessing(img),
        }
    }
}
