//! Candidate extraction by gradient-weighted circle voting.
//!
//! Edge pixels cast one vote per probe radius at the point that far along
//! the gradient direction (which points toward the dark-lesion centre in
//! the inverted view). A lesion collects votes from its whole rim into a
//! small neighbourhood, while an elongated edge spreads votes along a
//! parallel curve; normalising the gathered votes by the rim length 2*pi*r
//! turns that difference into a scale-free score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::finalize_candidates;
use crate::filter::{gaussian_blur, sobel};
use crate::geometry::Point;
use crate::image::GrayImage;
use crate::raster::Field;
use crate::types::Candidate;

/// Pre-smoothing applied before gradients are taken.
const SMOOTH_SIGMA: f64 = 1.0;

/// Gradient directions are quantized into this many bins per full turn.
const DIRECTION_BINS: u32 = 8;

/// A centre must gather votes from at least this many direction bins. A
/// round rim covers all bins; a straight or gently curved edge covers two
/// (its two rails), so this gate rejects elongated structures no matter how
/// strong their contrast.
const MIN_DIRECTION_BINS: u32 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HoughParams {
    /// Smallest probe radius (px).
    pub radius_min: u32,
    /// Largest probe radius (px), inclusive.
    pub radius_max: u32,
    /// Minimum gradient magnitude for a pixel to cast votes.
    pub edge_threshold: f64,
    /// Minimum normalised vote score (fraction of a full rim) for a centre
    /// to be kept. This is the strictness knob.
    pub vote_threshold: f64,
    /// Non-maximum suppression radius between accepted centres (px).
    pub nms_radius: f64,
}

impl Default for HoughParams {
    fn default() -> Self {
        HoughParams {
            radius_min: 2,
            radius_max: 8,
            edge_threshold: 5.0,
            vote_threshold: 1.0,
            nms_radius: 5.0,
        }
    }
}

impl HoughParams {
    pub fn validate(&self) -> Result<()> {
        if self.radius_min < 1 || self.radius_max < self.radius_min {
            return Err(Error::InvalidParams(
                "need 1 <= radius_min <= radius_max".into(),
            ));
        }
        if !(self.edge_threshold.is_finite() && self.edge_threshold > 0.0) {
            return Err(Error::InvalidParams(
                "edge_threshold must be positive".into(),
            ));
        }
        if !(self.vote_threshold.is_finite() && self.vote_threshold > 0.0) {
            return Err(Error::InvalidParams(
                "vote_threshold must be positive".into(),
            ));
        }
        if !(self.nms_radius.is_finite() && self.nms_radius >= 1.0) {
            return Err(Error::InvalidParams(
                "nms_radius must be at least 1 px".into(),
            ));
        }
        Ok(())
    }
}

/// Sum counts and union direction masks over each cell's 3x3 neighbourhood
/// so votes landing one cell apart from rounding still reinforce each other.
fn gather3(counts: &Field, dirs: &[u8]) -> (Field, Vec<u8>) {
    let (w, h) = (counts.w, counts.h);
    let mut out = Field::filled(w, h, 0.0);
    let mut out_dirs = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut s = 0.0;
            let mut m = 0u8;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                        s += counts.get(nx as usize, ny as usize);
                        m |= dirs[ny as usize * w + nx as usize];
                    }
                }
            }
            out.set(x, y, s);
            out_dirs[y * w + x] = m;
        }
    }
    (out, out_dirs)
}

pub fn extract_hough(img: &GrayImage, params: &HoughParams) -> Result<Vec<Candidate>> {
    params.validate()?;
    let (w, h) = (img.width(), img.height());
    let smoothed = gaussian_blur(&img.inverted_field(), SMOOTH_SIGMA);
    let (gx, gy) = sobel(&smoothed);

    let radii: Vec<u32> = (params.radius_min..=params.radius_max).collect();
    let mut planes: Vec<Field> = radii.iter().map(|_| Field::filled(w, h, 0.0)).collect();
    let mut plane_dirs: Vec<Vec<u8>> = radii.iter().map(|_| vec![0u8; w * h]).collect();
    for y in 0..h {
        for x in 0..w {
            let (dx, dy) = (gx.get(x, y), gy.get(x, y));
            let mag = (dx * dx + dy * dy).sqrt();
            if mag < params.edge_threshold {
                continue;
            }
            let (ux, uy) = (dx / mag, dy / mag);
            let angle = uy.atan2(ux) + std::f64::consts::PI;
            let bin = ((angle / (2.0 * std::f64::consts::PI) * f64::from(DIRECTION_BINS))
                as u32)
                .min(DIRECTION_BINS - 1);
            for (ri, &r) in radii.iter().enumerate() {
                let cx = (x as f64 + f64::from(r) * ux).round();
                let cy = (y as f64 + f64::from(r) * uy).round();
                if cx >= 0.0 && cy >= 0.0 && (cx as usize) < w && (cy as usize) < h {
                    let (cx, cy) = (cx as usize, cy as usize);
                    let v = planes[ri].get(cx, cy);
                    planes[ri].set(cx, cy, v + 1.0);
                    plane_dirs[ri][cy * w + cx] |= 1u8 << bin;
                }
            }
        }
    }

    let mut score = Field::filled(w, h, 0.0);
    for (ri, &r) in radii.iter().enumerate() {
        let (gathered, gathered_dirs) = gather3(&planes[ri], &plane_dirs[ri]);
        let rim = 2.0 * std::f64::consts::PI * f64::from(r);
        for i in 0..w * h {
            if u32::from(gathered_dirs[i].count_ones()) < MIN_DIRECTION_BINS {
                continue;
            }
            score.v[i] = score.v[i].max(gathered.v[i] / rim);
        }
    }

    // Greedy non-maximum suppression, strongest centre first; ties resolve
    // by raster order so the result does not depend on sort internals.
    let mut peaks: Vec<(f64, usize, usize)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let s = score.get(x, y);
            if s >= params.vote_threshold {
                peaks.push((s, y, x));
            }
        }
    }
    peaks.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then((a.1, a.2).cmp(&(b.1, b.2))));

    let mut accepted: Vec<Point> = Vec::new();
    let r2 = params.nms_radius * params.nms_radius;
    for &(_, y, x) in &peaks {
        let p = Point::new(x as f64, y as f64);
        let clear = accepted.iter().all(|q| {
            let (dx, dy) = (q.x - p.x, q.y - p.y);
            dx * dx + dy * dy >= r2
        });
        if clear {
            accepted.push(p);
        }
    }
    Ok(finalize_candidates(accepted, img))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{GrayImage, IntensityRange};

    #[test]
    fn finds_round_blob() {
        let (w, h) = (40, 40);
        let mut data = vec![170.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let (dx, dy) = (x as f64 - 19.0, y as f64 - 21.0);
                data[y * w + x] -= 50.0 * (-(dx * dx + dy * dy) / (2.0 * 2.0 * 2.0)).exp();
            }
        }
        let img = GrayImage::with_full_fov(w, h, data, IntensityRange::EIGHT_BIT).unwrap();
        let cands = extract_hough(&img, &HoughParams::default()).unwrap();
        assert_eq!(cands.len(), 1, "expected one candidate, got {cands:?}");
        assert!((cands[0].x - 19.0).abs() <= 2.0 && (cands[0].y - 21.0).abs() <= 2.0);
    }

    #[test]
    fn ignores_straight_vessel() {
        let (w, h) = (48, 48);
        let mut data = vec![170.0; w * h];
        for y in 0..h {
            for x in 0..w {
                // Diagonal dark line.
                let d = (x as f64 - y as f64) / std::f64::consts::SQRT_2;
                data[y * w + x] -= 55.0 * (-d * d / (2.0 * 1.5 * 1.5)).exp();
            }
        }
        let img = GrayImage::with_full_fov(w, h, data, IntensityRange::EIGHT_BIT).unwrap();
        let cands = extract_hough(&img, &HoughParams::default()).unwrap();
        assert!(cands.is_empty(), "line should not vote a centre: {cands:?}");
    }

    #[test]
    fn suppression_keeps_separated_blobs() {
        let (w, h) = (64, 32);
        let mut data = vec![170.0; w * h];
        for y in 0..h {
            for x in 0..w {
                for &(cx, cy) in &[(16.0, 16.0), (46.0, 16.0)] {
                    let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                    data[y * w + x] -= 45.0 * (-(dx * dx + dy * dy) / (2.0 * 1.8 * 1.8)).exp();
                }
            }
        }
        let img = GrayImage::with_full_fov(w, h, data, IntensityRange::EIGHT_BIT).unwrap();
        let cands = extract_hough(&img, &HoughParams::default()).unwrap();
        assert_eq!(cands.len(), 2, "got {cands:?}");
    }

    #[test]
    fn rejects_bad_params() {
        let p = HoughParams {
            radius_min: 5,
            radius_max: 3,
            ..HoughParams::default()
        };
        assert!(p.validate().is_err());
    }
}
