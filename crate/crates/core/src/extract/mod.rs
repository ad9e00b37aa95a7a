//! Candidate extraction: five detectors that turn a (possibly preprocessed)
//! image into a list of lesion candidate positions.
//!
//! All detectors work on the inverted FOV view (dark lesions become bright
//! maxima, surround forced to zero), emit sub-pixel centroids inside the
//! FOV, and order their output by (y, x). Each exposes one scalar strictness
//! threshold next to its shape parameters.

mod hough;
mod lazar;
mod spencer;
mod walter;
mod zhang;

pub use hough::{extract_hough, HoughParams};
pub use lazar::{extract_lazar, LazarParams};
pub use spencer::{extract_spencer, SpencerParams};
pub use walter::{extract_walter, WalterParams};
pub use zhang::{extract_zhang, ZhangParams};

use crate::detector::ExtractorId;
use crate::error::Result;
use crate::geometry::Point;
use crate::image::GrayImage;
use crate::types::Candidate;

/// An extractor bound to its parameters; constructing a variant is the only
/// way to name a detector, so parameters can never be missing.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtractorOp {
    Walter(WalterParams),
    Spencer(SpencerParams),
    Hough(HoughParams),
    Zhang(ZhangParams),
    Lazar(LazarParams),
}

impl ExtractorOp {
    pub fn id(&self) -> ExtractorId {
        match self {
            ExtractorOp::Walter(_) => ExtractorId::Walter,
            ExtractorOp::Spencer(_) => ExtractorId::Spencer,
            ExtractorOp::Hough(_) => ExtractorId::Hough,
            ExtractorOp::Zhang(_) => ExtractorId::Zhang,
            ExtractorOp::Lazar(_) => ExtractorId::Lazar,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ExtractorOp::Walter(p) => p.validate(),
            ExtractorOp::Spencer(p) => p.validate(),
            ExtractorOp::Hough(p) => p.validate(),
            ExtractorOp::Zhang(p) => p.validate(),
            ExtractorOp::Lazar(p) => p.validate(),
        }
    }

    pub fn run(&self, img: &GrayImage) -> Result<Vec<Candidate>> {
        match self {
            ExtractorOp::Walter(p) => extract_walter(img, p),
            ExtractorOp::Spencer(p) => extract_spencer(img, p),
            ExtractorOp::Hough(p) => extract_hough(img, p),
            ExtractorOp::Zhang(p) => extract_zhang(img, p),
            ExtractorOp::Lazar(p) => extract_lazar(img, p),
        }
    }
}

/// Region-growing flood cap; a region this large means the tolerance leaked
/// into background, so growth stops deterministically instead of flooding.
pub(crate) const GROW_CAP: usize = 2048;

/// Shared output discipline: keep points whose nearest pixel lies in the
/// FOV, order by (y, x), and drop exact duplicates.
pub(crate) fn finalize_candidates(points: Vec<Point>, img: &GrayImage) -> Vec<Candidate> {
    let mut pts: Vec<Point> = points
        .into_iter()
        .filter(|p| {
            let x = p.x.round();
            let y = p.y.round();
            x >= 0.0
                && y >= 0.0
                && (x as usize) < img.width()
                && (y as usize) < img.height()
                && img.in_fov(x as usize, y as usize)
        })
        .collect();
    pts.sort_by(|a, b| (a.y, a.x).partial_cmp(&(b.y, b.x)).unwrap());
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    pts.into_iter().map(|p| Candidate::new(p.x, p.y)).collect()
}
