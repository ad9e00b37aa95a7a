//! Scratch calibration probe (not part of the build).

use std::time::Instant;

use madetect_core::{
    euclidean_distance, generate_synthetic, Candidate, Dataset, ExtractorId, Grade,
    GroundTruthPoint, PreprocessingId, SyntheticSpec,
};
use madetect_cli::config::PipelineConfig;

fn sensitivity(cands: &[Candidate], gt: &[GroundTruthPoint], r: f64) -> (usize, usize) {
    let mut hit = 0;
    for g in gt {
        let gp = madetect_core::Point { x: g.x as f64, y: g.y as f64 };
        if cands
            .iter()
            .any(|c| euclidean_distance(c.position(), gp) < r)
        {
            hit += 1;
        }
    }
    (hit, gt.len())
}

fn blob_spec() -> SyntheticSpec {
    SyntheticSpec {
        image_count: 10,
        vessel_count: 0,
        grade_cycle: vec![Grade::R2],
        lesion_radius: (3.5, 4.5),
        lesion_contrast: (0.18, 0.30),
        noise_sigma: 1.0,
        seed: 11,
        ..SyntheticSpec::default()
    }
}

fn line_spec() -> SyntheticSpec {
    SyntheticSpec {
        image_count: 10,
        vessel_count: 4,
        grade_cycle: vec![Grade::R0],
        noise_sigma: 1.0,
        seed: 12,
        ..SyntheticSpec::default()
    }
}

fn main() {
    let cfg = PipelineConfig::default();
    let blobs: Dataset = generate_synthetic(&blob_spec()).unwrap();
    let lines: Dataset = generate_synthetic(&line_spec()).unwrap();

    println!("== extractor sanity (raw images, defaults) ==");
    for id in ExtractorId::ALL {
        let op = cfg.extractor_op(id, 1.0);
        let t = Instant::now();
        let mut hit = 0;
        let mut total = 0;
        let mut blob_cands = 0;
        for e in &blobs.entries {
            let c = op.run(&e.image).unwrap();
            blob_cands += c.len();
            let (h, n) = sensitivity(&c, &e.lesions, 5.0);
            hit += h;
            total += n;
        }
        let mut line_cands = 0;
        for e in &lines.entries {
            line_cands += op.run(&e.image).unwrap().len();
        }
        println!(
            "{:8} sens {:3}/{:3} = {:.3}  blob-cands {:4}  line-cands {:3}  ({:.2?})",
            id.to_string(),
            hit,
            total,
            hit as f64 / total as f64,
            blob_cands,
            line_cands,
            t.elapsed()
        );
    }

    println!("== line-candidate radii (distance from center, rim at {:.0}) ==", 0.48 * 384.0);
    for id in ExtractorId::ALL {
        let op = cfg.extractor_op(id, 1.0);
        let mut radii: Vec<f64> = Vec::new();
        for e in &lines.entries {
            let cx = e.image.width() as f64 / 2.0;
            let cy = e.image.height() as f64 / 2.0;
            for c in op.run(&e.image).unwrap() {
                radii.push(((c.x - cx).powi(2) + (c.y - cy).powi(2)).sqrt());
            }
        }
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let show: Vec<String> = radii.iter().map(|r| format!("{r:.0}")).collect();
        println!("{:8} n={:3} [{}]", id.to_string(), radii.len(), show.join(","));
    }

    // Render line image 0 with per-extractor candidates marked for visual diagnosis.
    for (name, id) in [("lazar", ExtractorId::Lazar), ("spencer", ExtractorId::Spencer), ("hough", ExtractorId::Hough), ("zhang", ExtractorId::Zhang)] {
        let op = cfg.extractor_op(id, 1.0);
        for (i, e) in lines.entries.iter().enumerate().take(2) {
            let img = &e.image;
            let (w, h) = (img.width(), img.height());
            let mut rgb = vec![0u8; w * h * 3];
            for y in 0..h {
                for x in 0..w {
                    let v = img.value(x, y).round().clamp(0.0, 255.0) as u8;
                    let o = (y * w + x) * 3;
                    rgb[o] = v; rgb[o + 1] = v; rgb[o + 2] = v;
                }
            }
            for c in op.run(img).unwrap() {
                let (cx, cy) = (c.x.round() as i64, c.y.round() as i64);
                for d in -3i64..=3 {
                    for (px, py) in [(cx + d, cy), (cx, cy + d)] {
                        if px >= 0 && py >= 0 && (px as usize) < w && (py as usize) < h {
                            let o = (py as usize * w + px as usize) * 3;
                            rgb[o] = 255; rgb[o + 1] = 40; rgb[o + 2] = 40;
                        }
                    }
                }
            }
            let buf: image::RgbImage = image::ImageBuffer::from_raw(w as u32, h as u32, rgb).unwrap();
            buf.save(format!("/tmp/diag_{name}_{i}.png")).unwrap();
        }
    }

    println!("== pair timing on one default image ==");
    let full = generate_synthetic(&SyntheticSpec { image_count: 1, seed: 3, ..SyntheticSpec::default() }).unwrap();
    let img = &full.entries[0].image;
    for pp in PreprocessingId::ALL {
        let t = Instant::now();
        let pre = cfg.preprocessing_op(pp).run(img).unwrap();
        let pre_t = t.elapsed();
        let mut per = String::new();
        for ex in ExtractorId::ALL {
            let t2 = Instant::now();
            let c = cfg.extractor_op(ex, 1.0).run(&pre).unwrap();
            per.push_str(&format!("{}:{} ({:.0?})  ", ex, c.len(), t2.elapsed()));
        }
        println!("{:16} pre {:.2?} | {}", pp.to_string(), pre_t, per);
    }
}
// quick spatial diagnosis appended via second main? no — edit below
