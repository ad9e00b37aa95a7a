//! Planar points and the two geometric primitives everything else shares:
//! Euclidean distance and centroids of point sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A position in image coordinates. `x` grows rightward, `y` downward,
/// in pixels; sub-pixel values are meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

pub fn euclidean_distance(a: Point, b: Point) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

/// Arithmetic mean of a point set. Errors on an empty slice.
pub fn centroid(points: &[Point]) -> Result<Point> {
    if points.is_empty() {
        return Err(Error::EmptyInput("centroid of zero points".into()));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.x).sum();
    let sy: f64 = points.iter().map(|p| p.y).sum();
    Ok(Point::new(sx / n, sy / n))
}
