//! Plain-text point files: detection candidates and lesion annotations.
//!
//! One point per line, space-separated, LF endings, `#` comments. Candidate
//! lines are `x y` or `x y confidence` with three decimal places; annotation
//! lines are integer `x y`. Round-trips are exact at that precision.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{Candidate, GroundTruthPoint};

const CANDIDATE_HEADER: &str = "# madetect candidates v1";
const ANNOTATION_HEADER: &str = "# madetect annotations v1";

/// Render candidates in the on-disk format.
pub fn format_candidates(cands: &[Candidate]) -> String {
    let mut out = String::with_capacity(24 * cands.len() + 32);
    out.push_str(CANDIDATE_HEADER);
    out.push('\n');
    for c in cands {
        match c.confidence {
            Some(conf) => {
                let _ = writeln!(out, "{:.3} {:.3} {:.3}", c.x, c.y, conf);
            }
            None => {
                let _ = writeln!(out, "{:.3} {:.3}", c.x, c.y);
            }
        }
    }
    out
}

pub fn save_candidates(path: &Path, cands: &[Candidate]) -> Result<()> {
    fs::write(path, format_candidates(cands)).map_err(|e| Error::io(path, e))
}

pub fn load_candidates(path: &Path) -> Result<Vec<Candidate>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::parse(path, li + 1, format!("bad number {s:?}")))
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [x, y] => out.push(Candidate::new(parse(x)?, parse(y)?)),
            [x, y, conf] => {
                out.push(Candidate::with_confidence(parse(x)?, parse(y)?, parse(conf)?))
            }
            _ => {
                return Err(Error::parse(
                    path,
                    li + 1,
                    format!("expected 'x y [confidence]', got {} fields", fields.len()),
                ))
            }
        }
    }
    Ok(out)
}

/// Render annotations in the on-disk format.
pub fn format_ground_truth(points: &[GroundTruthPoint]) -> String {
    let mut out = String::with_capacity(12 * points.len() + 32);
    out.push_str(ANNOTATION_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(out, "{} {}", p.x, p.y);
    }
    out
}

pub fn save_ground_truth(path: &Path, points: &[GroundTruthPoint]) -> Result<()> {
    fs::write(path, format_ground_truth(points)).map_err(|e| Error::io(path, e))
}

pub fn load_ground_truth(path: &Path) -> Result<Vec<GroundTruthPoint>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse = |s: &str| -> Result<u32> {
            s.parse().map_err(|_| {
                Error::parse(path, li + 1, format!("bad pixel coordinate {s:?}"))
            })
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [x, y] => out.push(GroundTruthPoint::new(parse(x)?, parse(y)?)),
            _ => {
                return Err(Error::parse(
                    path,
                    li + 1,
                    format!("expected 'x y', got {} fields", fields.len()),
                ))
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn empty_set_round_trips_through_a_header_only_file() {
        let dir = tmp();
        let path = dir.path().join("empty.txt");
        save_candidates(&path, &[]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "# madetect candidates v1\n");
        assert_eq!(load_candidates(&path).unwrap(), vec![]);
    }

    #[test]
    fn single_candidate_round_trips_exactly() {
        let dir = tmp();
        let path = dir.path().join("one.txt");
        let c = Candidate::with_confidence(10.5, 20.25, 0.75);
        save_candidates(&path, &[c]).unwrap();
        assert_eq!(load_candidates(&path).unwrap(), vec![c]);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.ends_with("10.500 20.250 0.750\n"));
    }

    #[test]
    fn two_column_rows_load_without_confidence() {
        let dir = tmp();
        let path = dir.path().join("raw.txt");
        fs::write(&path, "# comment\n12.000 8.500\n\n3 4\n").unwrap();
        let got = load_candidates(&path).unwrap();
        assert_eq!(got, vec![Candidate::new(12.0, 8.5), Candidate::new(3.0, 4.0)]);
    }

    #[test]
    fn malformed_line_is_reported_with_its_number() {
        let dir = tmp();
        let path = dir.path().join("bad.txt");
        fs::write(&path, "1.0 2.0\n3.0 oops\n").unwrap();
        let err = load_candidates(&path).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":2:"), "{msg}");

        fs::write(&path, "1.0 2.0 3.0 4.0\n").unwrap();
        assert!(load_candidates(&path).is_err());
    }

    #[test]
    fn annotations_round_trip_and_reject_fractions() {
        let dir = tmp();
        let path = dir.path().join("gt.txt");
        let pts = vec![GroundTruthPoint::new(10, 20), GroundTruthPoint::new(0, 5)];
        save_ground_truth(&path, &pts).unwrap();
        assert_eq!(load_ground_truth(&path).unwrap(), pts);

        fs::write(&path, "10.5 20\n").unwrap();
        assert!(load_ground_truth(&path).is_err());
    }

    proptest! {
        #[test]
        fn random_candidates_round_trip(
            raw in prop::collection::vec(
                (0u32..500_000, 0u32..500_000, 1u32..=1000),
                0..60,
            )
        ) {
            // coordinates and confidences on the 3-decimal grid
            let cands: Vec<Candidate> = raw
                .iter()
                .map(|&(x, y, c)| Candidate::with_confidence(
                    x as f64 / 1000.0,
                    y as f64 / 1000.0,
                    c as f64 / 1000.0,
                ))
                .collect();
            let dir = tmp();
            let path = dir.path().join("cands.txt");
            save_candidates(&path, &cands).unwrap();
            let loaded = load_candidates(&path).unwrap();
            prop_assert_eq!(&loaded, &cands);
            // a second save emits identical bytes
            let first = fs::read(&path).unwrap();
            save_candidates(&path, &loaded).unwrap();
            prop_assert_eq!(fs::read(&path).unwrap(), first);
        }
    }
}
