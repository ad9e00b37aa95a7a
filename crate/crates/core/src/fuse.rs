//! Fusion of per-detector candidate lists into confidence-weighted
//! detections.
//!
//! Every candidate in every list acts as a seed. A seed gathers at most one
//! candidate from each *other* list: the nearest one strictly closer than
//! the merge radius (ties broken toward the smaller (y, x)). Candidates
//! from the seed's own list are never gathered. The seed's fused detection
//! sits at the centroid of the gathered set and carries confidence k/n,
//! where k is the number of lists represented in the set and n the ensemble
//! size. Near-identical detections (within 1e-6 px) collapse to the one
//! with the highest confidence.

use crate::error::{Error, Result};
use crate::types::Candidate;

/// Distance under which two fused detections count as the same point.
const DEDUP_EPS: f64 = 1e-6;

/// Fuse candidate lists, one list per ensemble member.
pub fn fuse(per_member: &[Vec<Candidate>], merge_radius: f64) -> Result<Vec<Candidate>> {
    let slices: Vec<&[Candidate]> = per_member.iter().map(|v| v.as_slice()).collect();
    fuse_slices(&slices, merge_radius)
}

pub(crate) fn fuse_slices(
    per_member: &[&[Candidate]],
    merge_radius: f64,
) -> Result<Vec<Candidate>> {
    if per_member.is_empty() {
        return Err(Error::EmptyInput(
            "fusion needs at least one candidate list".into(),
        ));
    }
    if !(merge_radius.is_finite() && merge_radius > 0.0) {
        return Err(Error::InvalidParams(format!(
            "merge radius {merge_radius} must be positive"
        )));
    }
    let n = per_member.len();
    let r2 = merge_radius * merge_radius;

    let mut fused: Vec<Candidate> = Vec::new();
    for (mi, members) in per_member.iter().enumerate() {
        for seed in members.iter() {
            let mut gathered: Vec<(f64, f64)> = Vec::with_capacity(n); // (y, x)
            gathered.push((seed.y, seed.x));
            for (mj, others) in per_member.iter().enumerate() {
                if mj == mi {
                    continue;
                }
                // nearest candidate of this list, strictly inside the radius
                let mut best: Option<(f64, f64, f64)> = None; // (d2, y, x)
                for o in others.iter() {
                    let (dx, dy) = (o.x - seed.x, o.y - seed.y);
                    let d2 = dx * dx + dy * dy;
                    if d2 >= r2 {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bd2, by, bx)) => d2 < bd2 || (d2 == bd2 && (o.y, o.x) < (by, bx)),
                    };
                    if better {
                        best = Some((d2, o.y, o.x));
                    }
                }
                if let Some((_, oy, ox)) = best {
                    gathered.push((oy, ox));
                }
            }
            // sum in (y, x) order so the centroid is bit-identical no matter
            // how the member lists were ordered
            gathered.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let kf = gathered.len() as f64;
            let sy: f64 = gathered.iter().map(|g| g.0).sum();
            let sx: f64 = gathered.iter().map(|g| g.1).sum();
            fused.push(Candidate::with_confidence(
                sx / kf,
                sy / kf,
                kf / n as f64,
            ));
        }
    }

    // collapse detections that landed on the same point
    fused.sort_by(|a, b| {
        (a.y, a.x)
            .partial_cmp(&(b.y, b.x))
            .unwrap()
            .then(b.confidence.partial_cmp(&a.confidence).unwrap())
    });
    let mut out: Vec<Candidate> = Vec::with_capacity(fused.len());
    for c in fused {
        match out.last_mut() {
            Some(last) => {
                let (dx, dy) = (c.x - last.x, c.y - last.y);
                if (dx * dx + dy * dy).sqrt() < DEDUP_EPS {
                    if c.confidence > last.confidence {
                        *last = c;
                    }
                } else {
                    out.push(c);
                }
            }
            None => out.push(c),
        }
    }
    Ok(out)
}

/// Keep detections whose confidence reaches `min_confidence`. A missing
/// confidence counts as full certainty.
pub fn threshold_by_confidence(cands: &[Candidate], min_confidence: f64) -> Vec<Candidate> {
    cands
        .iter()
        .filter(|c| c.confidence.unwrap_or(1.0) >= min_confidence)
        .cloned()
        .collect()
}
