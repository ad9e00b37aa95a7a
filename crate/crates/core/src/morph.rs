//! Grayscale morphology on [`Field`] buffers: linear and disc structuring
//! elements, erosion/dilation/opening, an oriented-opening maximum for
//! line-like structure, and a bounding-box attribute opening that flattens
//! bright components narrower than a given diameter.

use crate::raster::Field;

/// Pixel offsets of a centered, symmetric digital line of `length` pixels at
/// angle `theta` (radians, measured from the +x axis).
pub(crate) fn line_se(length: usize, theta: f64) -> Vec<(i32, i32)> {
    let half = (length.max(1) as i32 - 1) / 2;
    let (s, c) = theta.sin_cos();
    let mut pts: Vec<(i32, i32)> = Vec::with_capacity(length);
    for t in -half..=half {
        let x = (t as f64 * c).round() as i32;
        let y = (t as f64 * s).round() as i32;
        if !pts.contains(&(x, y)) {
            pts.push((x, y));
        }
    }
    pts
}

/// Offsets of a Euclidean disc of the given radius, origin included.
pub(crate) fn disc_se(radius: i32) -> Vec<(i32, i32)> {
    let r2 = radius * radius;
    let mut pts = Vec::new();
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            if dx * dx + dy * dy <= r2 {
                pts.push((dx, dy));
            }
        }
    }
    pts
}

/// Grayscale erosion; offsets falling outside the image are ignored, so the
/// border behaves as if padded with +infinity. Structuring elements must be
/// symmetric around the origin (all of ours are).
pub(crate) fn erode(f: &Field, se: &[(i32, i32)]) -> Field {
    let mut out = Field::filled(f.w, f.h, 0.0);
    for y in 0..f.h {
        for x in 0..f.w {
            let mut m = f64::INFINITY;
            for &(dx, dy) in se {
                let xx = x as i64 + dx as i64;
                let yy = y as i64 + dy as i64;
                if xx >= 0 && (xx as usize) < f.w && yy >= 0 && (yy as usize) < f.h {
                    let v = f.v[yy as usize * f.w + xx as usize];
                    if v < m {
                        m = v;
                    }
                }
            }
            out.set(x, y, m);
        }
    }
    out
}

/// Grayscale dilation, dual of [`erode`].
pub(crate) fn dilate(f: &Field, se: &[(i32, i32)]) -> Field {
    let mut out = Field::filled(f.w, f.h, 0.0);
    for y in 0..f.h {
        for x in 0..f.w {
            let mut m = f64::NEG_INFINITY;
            for &(dx, dy) in se {
                let xx = x as i64 + dx as i64;
                let yy = y as i64 + dy as i64;
                if xx >= 0 && (xx as usize) < f.w && yy >= 0 && (yy as usize) < f.h {
                    let v = f.v[yy as usize * f.w + xx as usize];
                    if v > m {
                        m = v;
                    }
                }
            }
            out.set(x, y, m);
        }
    }
    out
}

/// Morphological opening: removes bright structure that cannot contain the
/// structuring element.
pub(crate) fn open(f: &Field, se: &[(i32, i32)]) -> Field {
    dilate(&erode(f, se), se)
}

/// Pointwise maximum of openings with a linear element rotated over
/// `orientations` evenly spaced angles in [0, pi). Preserves elongated bright
/// structure in any of the sampled directions; removes compact blobs.
pub(crate) fn max_linear_opening(f: &Field, length: usize, orientations: usize) -> Field {
    assert!(orientations >= 1);
    let mut out = Field::filled(f.w, f.h, f64::NEG_INFINITY);
    for k in 0..orientations {
        let theta = k as f64 * std::f64::consts::PI / orientations as f64;
        let opened = open(f, &line_se(length, theta));
        for (o, v) in out.v.iter_mut().zip(opened.v) {
            if v > *o {
                *o = v;
            }
        }
    }
    out
}

/// Binary dilation of a mask with a Euclidean disc.
pub(crate) fn dilate_mask(mask: &[bool], w: usize, h: usize, radius: i32) -> Vec<bool> {
    if radius <= 0 {
        return mask.to_vec();
    }
    let se = disc_se(radius);
    let mut out = vec![false; mask.len()];
    for y in 0..h {
        for x in 0..w {
            if !mask[y * w + x] {
                continue;
            }
            for &(dx, dy) in &se {
                let xx = x as i64 + dx as i64;
                let yy = y as i64 + dy as i64;
                if xx >= 0 && (xx as usize) < w && yy >= 0 && (yy as usize) < h {
                    out[yy as usize * w + xx as usize] = true;
                }
            }
        }
    }
    out
}

const NONE: u32 = u32::MAX;

/// Attribute opening on an 8-bit image: every bright connected structure is
/// lowered to the highest threshold level at which its 8-connected component
/// reaches a bounding-box max side of at least `lambda` pixels.
///
/// Components are tracked with a union-find over pixels processed in
/// descending gray order; each component keeps its bounding box plus a linked
/// list of pixels not yet assigned an output level, flushed the moment the
/// box grows wide (or tall) enough.
pub(crate) fn diameter_opening(q: &[u8], w: usize, h: usize, lambda: u32) -> Vec<u8> {
    assert_eq!(q.len(), w * h);
    let n = w * h;
    if lambda <= 1 {
        return q.to_vec();
    }

    // counting sort into per-level buckets, processed bright to dark
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); 256];
    for (i, &v) in q.iter().enumerate() {
        buckets[v as usize].push(i as u32);
    }

    let mut parent = vec![NONE; n];
    let mut size = vec![0u32; n];
    let mut minx = vec![0u32; n];
    let mut maxx = vec![0u32; n];
    let mut miny = vec![0u32; n];
    let mut maxy = vec![0u32; n];
    let mut big = vec![false; n];
    let mut head = vec![NONE; n];
    let mut tail = vec![NONE; n];
    let mut next = vec![NONE; n];
    let mut out = vec![0u8; n];

    fn find(parent: &mut [u32], mut p: u32) -> u32 {
        while parent[p as usize] != p {
            let gp = parent[parent[p as usize] as usize];
            parent[p as usize] = gp;
            p = gp;
        }
        p
    }

    let flush = |root: u32,
                 level: u8,
                 head: &mut [u32],
                 tail: &mut [u32],
                 next: &mut [u32],
                 out: &mut [u8]| {
        let mut p = head[root as usize];
        while p != NONE {
            out[p as usize] = level;
            let nx = next[p as usize];
            next[p as usize] = NONE;
            p = nx;
        }
        head[root as usize] = NONE;
        tail[root as usize] = NONE;
    };

    const NEIGHBORS: [(i64, i64); 8] = [
        (-1, -1),
        (0, -1),
        (1, -1),
        (-1, 0),
        (1, 0),
        (-1, 1),
        (0, 1),
        (1, 1),
    ];

    for level in (0u16..=255).rev() {
        let level = level as u8;
        for bi in 0..buckets[level as usize].len() {
            let p = buckets[level as usize][bi];
            let (px, py) = ((p as usize % w) as u32, (p as usize / w) as u32);
            parent[p as usize] = p;
            size[p as usize] = 1;
            minx[p as usize] = px;
            maxx[p as usize] = px;
            miny[p as usize] = py;
            maxy[p as usize] = py;
            big[p as usize] = false;
            head[p as usize] = p;
            tail[p as usize] = p;
            next[p as usize] = NONE;

            for (dx, dy) in NEIGHBORS {
                let nx = px as i64 + dx;
                let ny = py as i64 + dy;
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let q_idx = (ny as usize * w + nx as usize) as u32;
                if parent[q_idx as usize] == NONE {
                    continue; // darker pixel, not active yet
                }
                let ra = find(&mut parent, p);
                let rb = find(&mut parent, q_idx);
                if ra == rb {
                    continue;
                }
                // merge the smaller tree under the larger
                let (r, o) = if size[ra as usize] >= size[rb as usize] {
                    (ra, rb)
                } else {
                    (rb, ra)
                };
                parent[o as usize] = r;
                size[r as usize] += size[o as usize];
                minx[r as usize] = minx[r as usize].min(minx[o as usize]);
                maxx[r as usize] = maxx[r as usize].max(maxx[o as usize]);
                miny[r as usize] = miny[r as usize].min(miny[o as usize]);
                maxy[r as usize] = maxy[r as usize].max(maxy[o as usize]);
                big[r as usize] = big[r as usize] || big[o as usize];
                // splice o's unresolved pixels onto r's list
                if head[o as usize] != NONE {
                    if head[r as usize] == NONE {
                        head[r as usize] = head[o as usize];
                        tail[r as usize] = tail[o as usize];
                    } else {
                        next[tail[r as usize] as usize] = head[o as usize];
                        tail[r as usize] = tail[o as usize];
                    }
                    head[o as usize] = NONE;
                    tail[o as usize] = NONE;
                }
                let side = (maxx[r as usize] - minx[r as usize] + 1)
                    .max(maxy[r as usize] - miny[r as usize] + 1);
                if side >= lambda {
                    big[r as usize] = true;
                    flush(r, level, &mut head, &mut tail, &mut next, &mut out);
                }
            }

            // a freshly big component also resolves pixels joining it later
            let rp = find(&mut parent, p);
            if big[rp as usize] && head[rp as usize] != NONE {
                flush(rp, level, &mut head, &mut tail, &mut next, &mut out);
            }
        }
    }

    // components that never reached lambda (image narrower than lambda)
    // keep the initial 0 for their unresolved pixels
    out
}
