//! Detection and grading quality measures.
//!
//! Candidates match a ground-truth lesion when strictly closer than the
//! match radius. Sweeping the fused confidence threshold over its distinct
//! values yields a free-response curve of (false positives per image,
//! sensitivity) pairs; the headline score is the mean sensitivity at seven
//! reference false-positive rates. Image-level grading reduces each image
//! to its best detection confidence and is scored by the area under the
//! resulting ROC curve.

use crate::error::{Error, Result};
use crate::types::{Candidate, Grade, GroundTruthPoint};

/// Reference false-positive rates: 1/8 to 8 per image in octaves.
pub const CPM_RATES: [f64; 7] = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

/// Outcome of matching one image's candidates against its lesions.
/// Matching is many-to-one: several candidates may claim the same lesion,
/// so `true_positives + false_positives` counts candidates while
/// `matched_lesions + false_negatives` counts lesions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchResult {
    /// Candidates with at least one lesion strictly inside the radius.
    pub true_positives: usize,
    /// Candidates with no lesion strictly inside the radius.
    pub false_positives: usize,
    /// Lesions with no candidate strictly inside the radius.
    pub false_negatives: usize,
    /// Lesions with at least one candidate strictly inside the radius.
    pub matched_lesions: usize,
}

/// Match candidates to lesions by strict distance.
pub fn match_candidates(
    cands: &[Candidate],
    lesions: &[GroundTruthPoint],
    radius: f64,
) -> MatchResult {
    let r2 = radius * radius;
    let hit = |c: &Candidate, g: &GroundTruthPoint| {
        let (dx, dy) = (c.x - f64::from(g.x), c.y - f64::from(g.y));
        dx * dx + dy * dy < r2
    };
    let matched_lesions = lesions
        .iter()
        .filter(|g| cands.iter().any(|c| hit(c, g)))
        .count();
    let true_positives = cands
        .iter()
        .filter(|c| lesions.iter().any(|g| hit(c, g)))
        .count();
    MatchResult {
        true_positives,
        false_positives: cands.len() - true_positives,
        false_negatives: lesions.len() - matched_lesions,
        matched_lesions,
    }
}

/// One operating point of a free-response curve.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FrocPoint {
    /// Confidence cutoff producing this point.
    pub threshold: f64,
    /// False positives per image at the cutoff.
    pub fp_per_image: f64,
    /// Fraction of all lesions detected at the cutoff.
    pub sensitivity: f64,
}

/// Free-response curve, one point per distinct confidence, in decreasing
/// threshold order (false positives and sensitivity both non-decreasing).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FrocCurve {
    pub points: Vec<FrocPoint>,
    pub total_lesions: usize,
    pub image_count: usize,
}

/// Build the free-response curve for a set of images. Candidates without a
/// confidence count as full certainty.
pub fn froc(
    per_image: &[(&[Candidate], &[GroundTruthPoint])],
    match_radius: f64,
) -> Result<FrocCurve> {
    if per_image.is_empty() {
        return Err(Error::EmptyInput("no images to evaluate".into()));
    }
    if !(match_radius.is_finite() && match_radius > 0.0) {
        return Err(Error::InvalidParams(format!(
            "match radius {match_radius} must be positive"
        )));
    }
    let total_lesions: usize = per_image.iter().map(|(_, g)| g.len()).sum();
    if total_lesions == 0 {
        return Err(Error::UndefinedMetric(
            "sensitivity is undefined without lesions".into(),
        ));
    }
    let image_count = per_image.len();
    let r2 = match_radius * match_radius;

    // Per lesion: the best confidence of any candidate inside the radius.
    // Per candidate: false-positive status is threshold-independent.
    let mut lesion_conf: Vec<f64> = Vec::with_capacity(total_lesions);
    let mut fp_conf: Vec<f64> = Vec::new();
    let mut thresholds: Vec<f64> = Vec::new();
    for (cands, lesions) in per_image {
        for c in cands.iter() {
            let conf = c.confidence.unwrap_or(1.0);
            if !conf.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "candidate at ({}, {}) has non-finite confidence",
                    c.x, c.y
                )));
            }
            thresholds.push(conf);
            let matches_some = lesions.iter().any(|g| {
                let (dx, dy) = (c.x - f64::from(g.x), c.y - f64::from(g.y));
                dx * dx + dy * dy < r2
            });
            if !matches_some {
                fp_conf.push(conf);
            }
        }
        for g in lesions.iter() {
            let best = cands
                .iter()
                .filter(|c| {
                    let (dx, dy) = (c.x - f64::from(g.x), c.y - f64::from(g.y));
                    dx * dx + dy * dy < r2
                })
                .map(|c| c.confidence.unwrap_or(1.0))
                .fold(f64::NEG_INFINITY, f64::max);
            lesion_conf.push(best);
        }
    }

    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();

    let mut points = Vec::with_capacity(thresholds.len());
    for &t in &thresholds {
        let matched = lesion_conf.iter().filter(|&&v| v >= t).count();
        let fps = fp_conf.iter().filter(|&&v| v >= t).count();
        points.push(FrocPoint {
            threshold: t,
            fp_per_image: fps as f64 / image_count as f64,
            sensitivity: matched as f64 / total_lesions as f64,
        });
    }
    Ok(FrocCurve {
        points,
        total_lesions,
        image_count,
    })
}

/// Highest sensitivity reachable without exceeding the false-positive rate;
/// zero when every operating point lies above the rate.
pub fn sensitivity_at_rate(curve: &FrocCurve, rate: f64) -> f64 {
    curve
        .points
        .iter()
        .filter(|p| p.fp_per_image <= rate)
        .map(|p| p.sensitivity)
        .fold(0.0, f64::max)
}

/// Mean sensitivity over the seven reference false-positive rates. An empty
/// curve scores zero.
pub fn cpm(curve: &FrocCurve) -> f64 {
    let sum: f64 = CPM_RATES
        .iter()
        .map(|&rate| sensitivity_at_rate(curve, rate))
        .sum();
    sum / CPM_RATES.len() as f64
}

/// Area under the free-response curve between two false-positive rates,
/// normalised by the window width so a perfect detector scores 1.
///
/// Sensitivity is piecewise-linear between the operating points that fall
/// inside the window; the values at the window edges are filled by the same
/// step rule as [`sensitivity_at_rate`], so points beyond the window never
/// contribute. An empty curve scores zero.
pub fn partial_auc(curve: &FrocCurve, lo: f64, hi: f64) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
        return Err(Error::InvalidParams(format!(
            "bad false-positive window [{lo}, {hi}]"
        )));
    }
    if curve.points.is_empty() {
        return Ok(0.0);
    }
    let mut knots: Vec<(f64, f64)> = vec![(lo, sensitivity_at_rate(curve, lo))];
    let mut interior: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| p.fp_per_image > lo && p.fp_per_image < hi)
        .map(|p| (p.fp_per_image, p.sensitivity))
        .collect();
    interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (fp, sens) in interior {
        match knots.last_mut() {
            Some((last_fp, last_sens)) if *last_fp == fp => {
                *last_sens = last_sens.max(sens);
            }
            _ => knots.push((fp, sens)),
        }
    }
    knots.push((hi, sensitivity_at_rate(curve, hi)));
    let area: f64 = knots
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum();
    Ok(area / (hi - lo))
}

/// An image is graded diseased when any detection reaches the confidence
/// cutoff.
pub fn is_diseased(cands: &[Candidate], min_confidence: f64) -> bool {
    cands
        .iter()
        .any(|c| c.confidence.unwrap_or(1.0) >= min_confidence)
}

/// Image-level score used for grading: the best detection confidence, or
/// zero for an image with no detections.
pub fn image_score(cands: &[Candidate]) -> f64 {
    cands
        .iter()
        .map(|c| c.confidence.unwrap_or(1.0))
        .fold(0.0, f64::max)
}

/// Screening quality at one confidence cutoff.
///
/// Rates that lack a defined denominator (sensitivity with no diseased
/// image, specificity with no healthy one, a recognition rate for a grade
/// absent from the data) are reported as `None`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GradeRow {
    pub threshold: f64,
    /// Fraction of diseased images flagged.
    pub sensitivity: Option<f64>,
    /// Fraction of healthy images passed.
    pub specificity: Option<f64>,
    /// Fraction of all images classified correctly.
    pub accuracy: f64,
    /// Per-grade rate of the correct call: healthy for R0, diseased for
    /// R1 through R3. Indexed by [`Grade::index`].
    pub recognition: [Option<f64>; 4],
}

/// Image-level screening report over a sweep of confidence cutoffs.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GradeReport {
    pub rows: Vec<GradeRow>,
    /// Area under the empirical ROC of the per-image scores; `None` when
    /// the data lacks one of the two classes.
    pub auc: Option<f64>,
}

/// Grade every image by its best detection confidence and score the sweep
/// of cutoffs against the labelled grades (diseased = R1 and up).
pub fn grade(per_image: &[(&[Candidate], Grade)], thresholds: &[f64]) -> Result<GradeReport> {
    if per_image.is_empty() {
        return Err(Error::EmptyInput("no images to grade".into()));
    }
    let scores: Vec<f64> = per_image.iter().map(|(c, _)| image_score(c)).collect();
    let labels: Vec<bool> = per_image.iter().map(|(_, g)| g.is_diseased()).collect();
    let diseased = labels.iter().filter(|&&l| l).count();
    let healthy = labels.len() - diseased;

    let mut rows = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let flagged: Vec<bool> = scores.iter().map(|&s| s >= t).collect();
        let tp = flagged
            .iter()
            .zip(&labels)
            .filter(|(&f, &l)| f && l)
            .count();
        let tn = flagged
            .iter()
            .zip(&labels)
            .filter(|(&f, &l)| !f && !l)
            .count();
        let rate = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
        let mut recognition = [None; 4];
        for g in Grade::ALL {
            let of_grade = || per_image.iter().zip(&flagged).filter(|((_, gg), _)| *gg == g);
            let total = of_grade().count();
            let correct = of_grade()
                .filter(|((_, gg), &f)| if gg.is_diseased() { f } else { !f })
                .count();
            recognition[g.index()] = rate(correct, total);
        }
        rows.push(GradeRow {
            threshold: t,
            sensitivity: rate(tp, diseased),
            specificity: rate(tn, healthy),
            accuracy: (tp + tn) as f64 / labels.len() as f64,
            recognition,
        });
    }
    let auc = (diseased > 0 && healthy > 0)
        .then(|| roc_auc(&roc_points(&scores, &labels).expect("both classes present")));
    Ok(GradeReport { rows, auc })
}

/// ROC points (false-positive rate, true-positive rate) for binary labels
/// scored by `scores`, anchored at (0,0) and (1,1), in sweep order of
/// decreasing score cutoff.
pub fn roc_points(scores: &[f64], labels: &[bool]) -> Result<Vec<(f64, f64)>> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidParams(
            "scores and labels must pair up".into(),
        ));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedMetric(
            "ROC needs both positive and negative images".into(),
        ));
    }
    let mut cutoffs: Vec<f64> = scores.to_vec();
    cutoffs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    cutoffs.dedup();

    let mut points = vec![(0.0, 0.0)];
    for t in cutoffs {
        let tp = scores
            .iter()
            .zip(labels)
            .filter(|(s, &l)| l && **s >= t)
            .count();
        let fp = scores
            .iter()
            .zip(labels)
            .filter(|(s, &l)| !l && **s >= t)
            .count();
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    if *points.last().unwrap() != (1.0, 1.0) {
        points.push((1.0, 1.0));
    }
    Ok(points)
}

/// Trapezoidal area under ROC points ordered by increasing false-positive
/// rate.
pub fn roc_auc(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gt(x: u32, y: u32) -> GroundTruthPoint {
        GroundTruthPoint { x, y }
    }

    fn cc(x: f64, y: f64, conf: f64) -> Candidate {
        Candidate::with_confidence(x, y, conf)
    }

    #[test]
    fn matching_distance_is_strict() {
        let lesions = [gt(10, 10)];
        let at_radius = [Candidate::new(13.0, 10.0)];
        let inside = [Candidate::new(12.9, 10.0)];
        let m = match_candidates(&at_radius, &lesions, 3.0);
        assert_eq!(m.matched_lesions, 0);
        assert_eq!(m.false_positives, 1);
        assert_eq!(m.false_negatives, 1);
        let m = match_candidates(&inside, &lesions, 3.0);
        assert_eq!(m.matched_lesions, 1);
        assert_eq!(m.true_positives, 1);
        assert_eq!(m.false_positives, 0);
        assert_eq!(m.false_negatives, 0);
    }

    #[test]
    fn matching_counts_candidates_and_lesions_separately() {
        // no candidates: every lesion is missed
        let m = match_candidates(&[], &[gt(1, 1), gt(5, 5), gt(9, 9)], 3.0);
        assert_eq!(
            m,
            MatchResult {
                true_positives: 0,
                false_positives: 0,
                false_negatives: 3,
                matched_lesions: 3 - 3,
            }
        );
        // two candidates claim the same lesion: both are true positives
        let pair = [Candidate::new(10.5, 10.0), Candidate::new(9.5, 10.0)];
        let m = match_candidates(&pair, &[gt(10, 10)], 3.0);
        assert_eq!(m.true_positives, 2);
        assert_eq!(m.matched_lesions, 1);
        assert_eq!(m.false_negatives, 0);
        assert_eq!(m.false_positives, 0);
    }

    #[test]
    fn froc_sweeps_distinct_thresholds() {
        let img1_c = [cc(10.0, 10.5, 0.9), cc(30.0, 30.0, 0.8)];
        let img1_g = [gt(10, 10)];
        let img2_c = [cc(20.0, 20.0, 0.7)];
        let img2_g = [gt(5, 5)];
        let curve = froc(
            &[(&img1_c, &img1_g), (&img2_c, &img2_g)],
            3.0,
        )
        .unwrap();
        assert_eq!(curve.total_lesions, 2);
        assert_eq!(curve.points.len(), 3);
        let p = &curve.points;
        assert_eq!((p[0].threshold, p[0].fp_per_image, p[0].sensitivity), (0.9, 0.0, 0.5));
        assert_eq!((p[1].threshold, p[1].fp_per_image, p[1].sensitivity), (0.8, 0.5, 0.5));
        assert_eq!((p[2].threshold, p[2].fp_per_image, p[2].sensitivity), (0.7, 1.0, 0.5));
    }

    #[test]
    fn froc_needs_images_and_lesions() {
        assert!(matches!(froc(&[], 3.0), Err(Error::EmptyInput(_))));
        let c = [cc(1.0, 1.0, 0.5)];
        let g: [GroundTruthPoint; 0] = [];
        assert!(matches!(
            froc(&[(&c, &g)], 3.0),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn cpm_hand_case() {
        let curve = FrocCurve {
            points: vec![
                FrocPoint { threshold: 1.0, fp_per_image: 0.1, sensitivity: 0.3 },
                FrocPoint { threshold: 0.5, fp_per_image: 3.0, sensitivity: 0.6 },
            ],
            total_lesions: 10,
            image_count: 10,
        };
        // rates 1/8..2 see 0.3; rates 4 and 8 see 0.6
        let expect = (5.0 * 0.3 + 2.0 * 0.6) / 7.0;
        assert!((cpm(&curve) - expect).abs() < 1e-12);
    }

    #[test]
    fn cpm_of_empty_curve_is_zero() {
        let curve = FrocCurve { points: vec![], total_lesions: 5, image_count: 2 };
        assert_eq!(cpm(&curve), 0.0);
    }

    #[test]
    fn partial_auc_hand_case() {
        let curve = FrocCurve {
            points: vec![
                FrocPoint { threshold: 0.9, fp_per_image: 1.0, sensitivity: 0.4 },
                FrocPoint { threshold: 0.4, fp_per_image: 4.0, sensitivity: 0.8 },
            ],
            total_lesions: 10,
            image_count: 10,
        };
        // rise 0.125->1 to 0.4, trapezoid 1->4 to 0.8, flat 4->8:
        // (0.875*0.2 + 3*0.6 + 4*0.8) / 7.875
        let expect = (0.875 * 0.2 + 3.0 * 0.6 + 4.0 * 0.8) / 7.875;
        let got = partial_auc(&curve, 0.125, 8.0).unwrap();
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn partial_auc_of_perfect_detector_is_one() {
        let curve = FrocCurve {
            points: vec![FrocPoint { threshold: 1.0, fp_per_image: 0.0, sensitivity: 1.0 }],
            total_lesions: 4,
            image_count: 2,
        };
        let got = partial_auc(&curve, 0.125, 8.0).unwrap();
        assert!((got - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_auc_ignores_points_beyond_the_window() {
        // identical inside the window; the second curve adds a point at
        // 10 FP/image that must not leak in through interpolation
        let base = vec![
            FrocPoint { threshold: 0.9, fp_per_image: 1.0, sensitivity: 0.4 },
            FrocPoint { threshold: 0.4, fp_per_image: 4.0, sensitivity: 0.8 },
        ];
        let mut noisy = base.clone();
        noisy.push(FrocPoint { threshold: 0.1, fp_per_image: 10.0, sensitivity: 1.0 });
        let a = FrocCurve { points: base, total_lesions: 10, image_count: 10 };
        let b = FrocCurve { points: noisy, total_lesions: 10, image_count: 10 };
        assert_eq!(
            partial_auc(&a, 0.125, 8.0).unwrap(),
            partial_auc(&b, 0.125, 8.0).unwrap()
        );
    }

    #[test]
    fn grade_report_scores_threshold_sweep() {
        let sick = [cc(1.0, 1.0, 0.9)];
        let mild = [cc(2.0, 2.0, 0.4)];
        let clean: [Candidate; 0] = [];
        let noisy = [cc(3.0, 3.0, 0.6)];
        let data: Vec<(&[Candidate], Grade)> = vec![
            (&sick, Grade::R2),
            (&mild, Grade::R1),
            (&clean, Grade::R0),
            (&noisy, Grade::R0),
        ];
        let report = grade(&data, &[0.5]).unwrap();
        let row = &report.rows[0];
        // at 0.5: flags sick and noisy; misses mild; passes clean
        assert_eq!(row.sensitivity, Some(0.5));
        assert_eq!(row.specificity, Some(0.5));
        assert_eq!(row.accuracy, 0.5);
        assert_eq!(row.recognition[Grade::R0.index()], Some(0.5));
        assert_eq!(row.recognition[Grade::R1.index()], Some(0.0));
        assert_eq!(row.recognition[Grade::R2.index()], Some(1.0));
        assert_eq!(row.recognition[Grade::R3.index()], None);
        // scores: R2 -> 0.9, R1 -> 0.4, R0 -> 0.0, R0 -> 0.6; the sweep over
        // cutoffs 0.9, 0.6, 0.4, 0.0 gives ROC (0,.5),(.5,.5),(.5,1),(1,1),
        // whose trapezoid area is 0.25 + 0.5
        assert!((report.auc.unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn grade_report_without_both_classes_withholds_rates() {
        let c = [cc(1.0, 1.0, 0.7)];
        let data: Vec<(&[Candidate], Grade)> = vec![(&c, Grade::R1)];
        let report = grade(&data, &[0.5]).unwrap();
        assert_eq!(report.auc, None);
        assert_eq!(report.rows[0].sensitivity, Some(1.0));
        assert_eq!(report.rows[0].specificity, None);
        assert_eq!(report.rows[0].recognition[Grade::R0.index()], None);
        assert!(grade(&[], &[0.5]).is_err());
    }

    #[test]
    fn grading_reduces_to_best_confidence() {
        let cands = [cc(1.0, 1.0, 0.25), cc(2.0, 2.0, 0.75)];
        assert_eq!(image_score(&cands), 0.75);
        assert!(is_diseased(&cands, 0.5));
        assert!(!is_diseased(&cands, 0.8));
        assert_eq!(image_score(&[]), 0.0);
        assert!(!is_diseased(&[], 0.1));
    }

    #[test]
    fn roc_separates_perfectly_ordered_scores() {
        let scores = [0.9, 0.8, 0.3, 0.2];
        let labels = [true, true, false, false];
        let points = roc_points(&scores, &labels).unwrap();
        assert_eq!(points.first(), Some(&(0.0, 0.0)));
        assert_eq!(points.last(), Some(&(1.0, 1.0)));
        assert!((roc_auc(&points) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn roc_of_constant_scores_is_chance() {
        let scores = [0.5, 0.5, 0.5, 0.5];
        let labels = [true, false, true, false];
        let points = roc_points(&scores, &labels).unwrap();
        assert!((roc_auc(&points) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn roc_requires_both_classes() {
        assert!(roc_points(&[0.5, 0.6], &[true, true]).is_err());
    }
}
