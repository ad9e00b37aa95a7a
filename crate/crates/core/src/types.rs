//! Detection-domain value types: candidates, ground-truth marks, and
//! retinopathy grades.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::Point;

/// A detected lesion location. Raw extractor output carries no confidence;
/// fusion attaches one in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub x: f64,
    pub y: f64,
    pub confidence: Option<f64>,
}

impl Candidate {
    pub fn new(x: f64, y: f64) -> Self {
        Candidate {
            x,
            y,
            confidence: None,
        }
    }

    pub fn with_confidence(x: f64, y: f64, confidence: f64) -> Self {
        Candidate {
            x,
            y,
            confidence: Some(confidence),
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// A manually annotated lesion center. Annotations are whole pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroundTruthPoint {
    pub x: u32,
    pub y: u32,
}

impl GroundTruthPoint {
    pub fn new(x: u32, y: u32) -> Self {
        GroundTruthPoint { x, y }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x as f64, self.y as f64)
    }
}

/// Retinopathy severity grade. R0 is healthy; R1 through R3 are diseased in
/// increasing severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Grade {
    R0,
    R1,
    R2,
    R3,
}

impl Grade {
    pub const ALL: [Grade; 4] = [Grade::R0, Grade::R1, Grade::R2, Grade::R3];

    pub fn is_diseased(&self) -> bool {
        *self != Grade::R0
    }

    pub fn index(&self) -> usize {
        match self {
            Grade::R0 => 0,
            Grade::R1 => 1,
            Grade::R2 => 2,
            Grade::R3 => 3,
        }
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Grade::R0 => "R0",
            Grade::R1 => "R1",
            Grade::R2 => "R2",
            Grade::R3 => "R3",
        };
        f.write_str(s)
    }
}

impl FromStr for Grade {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "R0" | "r0" => Ok(Grade::R0),
            "R1" | "r1" => Ok(Grade::R1),
            "R2" | "r2" => Ok(Grade::R2),
            "R3" | "r3" => Ok(Grade::R3),
            other => Err(Error::InvalidParams(format!("unknown grade {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grade_round_trip_and_disease_split() {
        for g in Grade::ALL {
            assert_eq!(g.to_string().parse::<Grade>().unwrap(), g);
        }
        assert!(!Grade::R0.is_diseased());
        assert!(Grade::R1.is_diseased());
        assert!(Grade::R3.is_diseased());
    }
}
