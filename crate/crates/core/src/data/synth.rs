//! Synthetic fundus-like test images with known lesion positions.
//!
//! Each image is a vignetted disc on a black background, crossed by a few
//! dark curved vessels, with small dark Gaussian spots as lesions and
//! optional sensor noise. The lesion count is tied to the image's grade so
//! graded experiments have a consistent ground truth. Generation is fully
//! deterministic: image `i` uses stream `i` of a counter-based generator
//! seeded from the spec, so the set is reproducible pixel for pixel and
//! independent of how work is split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{euclidean_distance, Point};
use crate::image::{GrayImage, IntensityRange};
use crate::types::{Grade, GroundTruthPoint};

use super::manifest::{Dataset, DatasetEntry};

/// Field-of-view radius as a fraction of the shorter image side.
const FOV_RADIUS_FACTOR: f64 = 0.48;
/// Peak fraction of intensity removed at the center of a vessel.
const VESSEL_CONTRAST: f64 = 0.35;
/// Placement attempts per lesion before giving up.
const PLACEMENT_ATTEMPTS: usize = 1000;

fn default_image_count() -> usize {
    12
}
fn default_side() -> usize {
    384
}
fn default_background() -> f64 {
    120.0
}
fn default_vignetting() -> f64 {
    0.35
}
fn default_vessel_count() -> usize {
    4
}
fn default_vessel_width() -> (f64, f64) {
    (1.5, 3.0)
}
fn default_lesion_counts() -> Vec<(u32, u32)> {
    vec![(0, 0), (1, 4), (5, 10), (11, 16)]
}
fn default_grade_cycle() -> Vec<Grade> {
    Grade::ALL.to_vec()
}
fn default_lesion_radius() -> (f64, f64) {
    (2.0, 5.0)
}
fn default_lesion_contrast() -> (f64, f64) {
    (0.10, 0.30)
}
fn default_noise_sigma() -> f64 {
    1.0
}

/// Everything that determines a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    #[serde(default = "default_image_count")]
    pub image_count: usize,
    #[serde(default = "default_side")]
    pub width: usize,
    #[serde(default = "default_side")]
    pub height: usize,
    /// Disc intensity at the center, before any darkening.
    #[serde(default = "default_background")]
    pub background: f64,
    /// Radial falloff: the disc edge keeps `1 - vignetting` of the center.
    #[serde(default = "default_vignetting")]
    pub vignetting: f64,
    #[serde(default = "default_vessel_count")]
    pub vessel_count: usize,
    /// Per-vessel stroke width range in pixels.
    #[serde(default = "default_vessel_width")]
    pub vessel_width: (f64, f64),
    /// Inclusive lesion-count range per grade, contiguous and ascending.
    #[serde(default = "default_lesion_counts")]
    pub lesion_counts: Vec<(u32, u32)>,
    /// Grades assigned to images in rotation.
    #[serde(default = "default_grade_cycle")]
    pub grade_cycle: Vec<Grade>,
    /// Lesion radius range in pixels.
    #[serde(default = "default_lesion_radius")]
    pub lesion_radius: (f64, f64),
    /// Fraction of local intensity a lesion removes at its center.
    #[serde(default = "default_lesion_contrast")]
    pub lesion_contrast: (f64, f64),
    /// Additive Gaussian noise inside the disc; zero disables it.
    #[serde(default = "default_noise_sigma")]
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            image_count: default_image_count(),
            width: default_side(),
            height: default_side(),
            background: default_background(),
            vignetting: default_vignetting(),
            vessel_count: default_vessel_count(),
            vessel_width: default_vessel_width(),
            lesion_counts: default_lesion_counts(),
            grade_cycle: default_grade_cycle(),
            lesion_radius: default_lesion_radius(),
            lesion_contrast: default_lesion_contrast(),
            noise_sigma: default_noise_sigma(),
            seed: 0,
        }
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo <= hi) {
        return Err(Error::InvalidParams(format!(
            "{name} range ({lo}, {hi}) must be positive and ordered"
        )));
    }
    Ok(())
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.image_count == 0 {
            return Err(Error::InvalidParams("image count must be positive".into()));
        }
        if self.width < 32 || self.height < 32 {
            return Err(Error::InvalidParams(format!(
                "image size {}x{} is too small to hold a disc",
                self.width, self.height
            )));
        }
        if !(self.background.is_finite() && self.background > 0.0) {
            return Err(Error::InvalidParams(format!(
                "background {} must be positive",
                self.background
            )));
        }
        if !(0.0..=1.0).contains(&self.vignetting) {
            return Err(Error::InvalidParams(format!(
                "vignetting {} must lie in [0, 1]",
                self.vignetting
            )));
        }
        check_range("vessel width", self.vessel_width)?;
        check_range("lesion radius", self.lesion_radius)?;
        let (clo, chi) = self.lesion_contrast;
        if !(clo.is_finite() && chi.is_finite() && 0.0 < clo && clo <= chi && chi < 1.0) {
            return Err(Error::InvalidParams(format!(
                "lesion contrast ({clo}, {chi}) must lie inside (0, 1) and be ordered"
            )));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "noise sigma {} must be non-negative",
                self.noise_sigma
            )));
        }
        if self.grade_cycle.is_empty() {
            return Err(Error::InvalidParams("grade cycle is empty".into()));
        }
        if self.lesion_counts.len() != Grade::ALL.len() {
            return Err(Error::InvalidParams(format!(
                "lesion counts has {} entries, one per grade is required",
                self.lesion_counts.len()
            )));
        }
        if self.lesion_counts[0].0 != 0 {
            return Err(Error::InvalidParams(
                "healthy images must allow zero lesions".into(),
            ));
        }
        for (i, &(lo, hi)) in self.lesion_counts.iter().enumerate() {
            if lo > hi {
                return Err(Error::InvalidParams(format!(
                    "lesion count range ({lo}, {hi}) is reversed"
                )));
            }
            if i > 0 && lo != self.lesion_counts[i - 1].1 + 1 {
                return Err(Error::InvalidParams(
                    "lesion count ranges must be contiguous and ascending".into(),
                ));
            }
        }
        Ok(())
    }

    /// The grade whose lesion-count range contains `count`.
    pub fn grade_for_count(&self, count: usize) -> Option<Grade> {
        let count = u32::try_from(count).ok()?;
        Grade::ALL
            .iter()
            .zip(&self.lesion_counts)
            .find(|(_, &(lo, hi))| lo <= count && count <= hi)
            .map(|(&g, _)| g)
    }

    fn fov_radius(&self) -> f64 {
        FOV_RADIUS_FACTOR * self.width.min(self.height) as f64
    }
}

/// Generate the full image set a spec describes.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let entries: Vec<DatasetEntry> = (0..spec.image_count)
        .into_par_iter()
        .map(|i| generate_image(spec, i))
        .collect::<Result<_>>()?;
    Ok(Dataset {
        entries,
        grading: true,
    })
}

fn generate_image(spec: &SyntheticSpec, index: usize) -> Result<DatasetEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);

    let (w, h) = (spec.width, spec.height);
    let center = Point::new(w as f64 / 2.0, h as f64 / 2.0);
    let r_fov = spec.fov_radius();

    let grade = spec.grade_cycle[index % spec.grade_cycle.len()];
    let (lo, hi) = spec.lesion_counts[grade.index()];
    let lesion_count = rng.gen_range(lo..=hi) as usize;

    // Vignetted disc.
    let mut data = vec![0.0f64; w * h];
    let mut fov = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let d = euclidean_distance(Point::new(x as f64, y as f64), center);
            if d <= r_fov {
                let falloff = 1.0 - spec.vignetting * (d / r_fov).powi(2);
                data[y * w + x] = spec.background * falloff;
                fov[y * w + x] = true;
            }
        }
    }

    // Vessels: dark tubes along random cubic curves across the disc.
    let mut tube = vec![0.0f64; w * h];
    for _ in 0..spec.vessel_count {
        let theta0 = rng.gen_range(0.0..std::f64::consts::TAU);
        let jitter = rng.gen_range(-0.5..0.5);
        let theta1 = theta0 + std::f64::consts::PI + jitter;
        let offset1 = rng.gen_range(-0.35 * r_fov..0.35 * r_fov);
        let offset2 = rng.gen_range(-0.35 * r_fov..0.35 * r_fov);
        let width = rng.gen_range(spec.vessel_width.0..=spec.vessel_width.1);

        let p0 = Point::new(
            center.x + r_fov * theta0.cos(),
            center.y + r_fov * theta0.sin(),
        );
        let p3 = Point::new(
            center.x + r_fov * theta1.cos(),
            center.y + r_fov * theta1.sin(),
        );
        let chord = Point::new(p3.x - p0.x, p3.y - p0.y);
        let len = (chord.x * chord.x + chord.y * chord.y).sqrt().max(1e-9);
        let perp = Point::new(-chord.y / len, chord.x / len);
        let p1 = Point::new(
            p0.x + chord.x / 3.0 + offset1 * perp.x,
            p0.y + chord.y / 3.0 + offset1 * perp.y,
        );
        let p2 = Point::new(
            p0.x + 2.0 * chord.x / 3.0 + offset2 * perp.x,
            p0.y + 2.0 * chord.y / 3.0 + offset2 * perp.y,
        );

        stamp_tube(&mut tube, w, h, [p0, p1, p2, p3], width, r_fov);
    }
    for (v, &t) in data.iter_mut().zip(&tube) {
        *v *= 1.0 - VESSEL_CONTRAST * t;
    }

    // Lesions: small dark Gaussian spots, kept inside the disc and apart
    // from each other so every one is individually resolvable.
    let min_separation = 2.0 * spec.lesion_radius.1;
    let mut lesions: Vec<GroundTruthPoint> = Vec::with_capacity(lesion_count);
    let mut placed: Vec<(Point, f64, f64)> = Vec::with_capacity(lesion_count);
    for _ in 0..lesion_count {
        let mut accepted = false;
        for _ in 0..PLACEMENT_ATTEMPTS {
            let x = rng.gen_range(0..w);
            let y = rng.gen_range(0..h);
            let radius = rng.gen_range(spec.lesion_radius.0..=spec.lesion_radius.1);
            let contrast = rng.gen_range(spec.lesion_contrast.0..=spec.lesion_contrast.1);
            let p = Point::new(x as f64, y as f64);
            if euclidean_distance(p, center) + radius + 2.0 > r_fov {
                continue;
            }
            if placed.iter().any(|(q, _, _)| euclidean_distance(p, *q) < min_separation) {
                continue;
            }
            lesions.push(GroundTruthPoint::new(x as u32, y as u32));
            placed.push((p, radius, contrast));
            accepted = true;
            break;
        }
        if !accepted {
            return Err(Error::Generation(format!(
                "could not place {lesion_count} separated lesions in a {w}x{h} image"
            )));
        }
    }
    for &(p, radius, contrast) in &placed {
        stamp_lesion(&mut data, w, h, p, radius, contrast);
    }

    // Sensor noise inside the disc only, in row-major order.
    if spec.noise_sigma > 0.0 {
        let normal = Normal::new(0.0, spec.noise_sigma)
            .map_err(|e| Error::InvalidParams(format!("noise sigma: {e}")))?;
        for (v, &inside) in data.iter_mut().zip(&fov) {
            if inside {
                *v += normal.sample(&mut rng);
            }
        }
    }

    // Quantize like an 8-bit capture would.
    for v in &mut data {
        *v = v.round().clamp(0.0, 255.0);
    }

    let image = GrayImage::new(w, h, data, fov, IntensityRange::EIGHT_BIT)?;
    Ok(DatasetEntry {
        name: format!("img_{index:03}"),
        image,
        lesions,
        grade: Some(grade),
    })
}

/// Max-blend a Gaussian-profile tube along a cubic curve into `tube`.
fn stamp_tube(tube: &mut [f64], w: usize, h: usize, ctrl: [Point; 4], width: f64, r_fov: f64) {
    let sigma = width / 2.0;
    let reach = (3.0 * sigma).ceil() as isize;
    let samples = (12.0 * r_fov).ceil() as usize;
    for s in 0..=samples {
        let t = s as f64 / samples as f64;
        let p = cubic_point(ctrl, t);
        let cx = p.x.round() as isize;
        let cy = p.y.round() as isize;
        for y in (cy - reach).max(0)..=(cy + reach).min(h as isize - 1) {
            for x in (cx - reach).max(0)..=(cx + reach).min(w as isize - 1) {
                let d2 = (x as f64 - p.x).powi(2) + (y as f64 - p.y).powi(2);
                let g = (-d2 / (2.0 * sigma * sigma)).exp();
                let cell = &mut tube[y as usize * w + x as usize];
                if g > *cell {
                    *cell = g;
                }
            }
        }
    }
}

fn cubic_point(ctrl: [Point; 4], t: f64) -> Point {
    let u = 1.0 - t;
    let b = [
        u * u * u,
        3.0 * u * u * t,
        3.0 * u * t * t,
        t * t * t,
    ];
    let mut x = 0.0;
    let mut y = 0.0;
    for (p, w) in ctrl.iter().zip(b) {
        x += w * p.x;
        y += w * p.y;
    }
    Point::new(x, y)
}

/// Multiply a dark Gaussian spot into the image around `p`.
fn stamp_lesion(data: &mut [f64], w: usize, h: usize, p: Point, radius: f64, contrast: f64) {
    let sigma = radius / 2.0;
    let reach = (3.0 * sigma).ceil() as isize;
    let cx = p.x as isize;
    let cy = p.y as isize;
    for y in (cy - reach).max(0)..=(cy + reach).min(h as isize - 1) {
        for x in (cx - reach).max(0)..=(cx + reach).min(w as isize - 1) {
            let d2 = (x as f64 - p.x).powi(2) + (y as f64 - p.y).powi(2);
            let g = (-d2 / (2.0 * sigma * sigma)).exp();
            data[y as usize * w + x as usize] *= 1.0 - contrast * g;
        }
    }
}
