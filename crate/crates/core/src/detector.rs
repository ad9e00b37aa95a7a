//! Detector pairs and ensembles.
//!
//! A detector pair binds one preprocessing method to one candidate
//! extractor; an ensemble is a non-empty, duplicate-free set of pairs. Pair
//! identities are stable strings like `clahe:walter`, used in reports,
//! candidate caches and search logs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::ExtractorOp;
use crate::image::GrayImage;
use crate::preprocess::PreprocessingOp;
use crate::types::Candidate;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum PreprocessingId {
    None,
    WalterKlein,
    Clahe,
    VesselRemoval,
    IlluminationEq,
}

impl PreprocessingId {
    pub const ALL: [PreprocessingId; 5] = [
        PreprocessingId::None,
        PreprocessingId::WalterKlein,
        PreprocessingId::Clahe,
        PreprocessingId::VesselRemoval,
        PreprocessingId::IlluminationEq,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PreprocessingId::None => "none",
            PreprocessingId::WalterKlein => "walter-klein",
            PreprocessingId::Clahe => "clahe",
            PreprocessingId::VesselRemoval => "vessel-removal",
            PreprocessingId::IlluminationEq => "illumination-eq",
        }
    }
}

impl fmt::Display for PreprocessingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PreprocessingId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PreprocessingId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown preprocessing id {s:?}")))
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractorId {
    Walter,
    Spencer,
    Hough,
    Zhang,
    Lazar,
}

impl ExtractorId {
    pub const ALL: [ExtractorId; 5] = [
        ExtractorId::Walter,
        ExtractorId::Spencer,
        ExtractorId::Hough,
        ExtractorId::Zhang,
        ExtractorId::Lazar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExtractorId::Walter => "walter",
            ExtractorId::Spencer => "spencer",
            ExtractorId::Hough => "hough",
            ExtractorId::Zhang => "zhang",
            ExtractorId::Lazar => "lazar",
        }
    }
}

impl fmt::Display for ExtractorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExtractorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExtractorId::ALL
            .iter()
            .copied()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown extractor id {s:?}")))
    }
}

/// Stable identity of a preprocessing/extractor pair. Pairs order by their
/// string form, so sorted listings read alphabetically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairId {
    pub preprocessing: PreprocessingId,
    pub extractor: ExtractorId,
}

impl Ord for PairId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.preprocessing.as_str(), self.extractor.as_str())
            .cmp(&(other.preprocessing.as_str(), other.extractor.as_str()))
    }
}

impl PartialOrd for PairId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl PairId {
    pub fn new(preprocessing: PreprocessingId, extractor: ExtractorId) -> Self {
        PairId {
            preprocessing,
            extractor,
        }
    }
}

impl fmt::Display for PairId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.preprocessing, self.extractor)
    }
}

impl FromStr for PairId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (pp, ex) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidParams(format!("pair id {s:?} is not 'pp:extractor'")))?;
        Ok(PairId::new(pp.parse()?, ex.parse()?))
    }
}

impl Serialize for PairId {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PairId {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One preprocessing method bound to one extractor, with parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorPair {
    pub preprocessing: PreprocessingOp,
    pub extractor: ExtractorOp,
}

impl DetectorPair {
    pub fn new(preprocessing: PreprocessingOp, extractor: ExtractorOp) -> Self {
        DetectorPair {
            preprocessing,
            extractor,
        }
    }

    pub fn id(&self) -> PairId {
        PairId::new(self.preprocessing.id(), self.extractor.id())
    }

    pub fn validate(&self) -> Result<()> {
        self.preprocessing.validate()?;
        self.extractor.validate()
    }

    /// Preprocess the image, then extract candidates from the result.
    pub fn run_on(&self, img: &GrayImage) -> Result<Vec<Candidate>> {
        let prepared = self.preprocessing.run(img)?;
        self.extractor.run(&prepared)
    }
}

/// A non-empty, sorted, duplicate-free selection of detector pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ensemble {
    members: Vec<PairId>,
}

impl Ensemble {
    pub fn new(mut members: Vec<PairId>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyInput(
                "an ensemble needs at least one member".into(),
            ));
        }
        members.sort();
        members.dedup();
        Ok(Ensemble { members })
    }

    pub fn members(&self) -> &[PairId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Canonical printable form, e.g. `clahe:walter + none:lazar`.
    pub fn signature(&self) -> String {
        let parts: Vec<String> = self.members.iter().map(|m| m.to_string()).collect();
        parts.join(" + ")
    }
}
