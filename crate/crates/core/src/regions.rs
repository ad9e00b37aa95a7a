//! Binary-region utilities: 8-connected components, hysteresis selection,
//! centroids, and intensity-bounded region growing.

use crate::geometry::Point;
use crate::raster::Field;

/// 8-connected components of a boolean mask, each returned as a list of
/// pixel indices. Component order follows raster order of their first pixel;
/// pixel order within a component is the BFS visit order.
pub(crate) fn connected_components(mask: &[bool], w: usize, h: usize) -> Vec<Vec<u32>> {
    assert_eq!(mask.len(), w * h);
    let mut seen = vec![false; mask.len()];
    let mut components = Vec::new();
    let mut queue = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.clear();
        queue.push(start as u32);
        let mut pixels = Vec::new();
        let mut qi = 0;
        while qi < queue.len() {
            let p = queue[qi] as usize;
            qi += 1;
            pixels.push(p as u32);
            let px = (p % w) as i64;
            let py = (p / w) as i64;
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let nx = px + dx;
                    let ny = py + dy;
                    if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                        continue;
                    }
                    let ni = ny as usize * w + nx as usize;
                    if mask[ni] && !seen[ni] {
                        seen[ni] = true;
                        queue.push(ni as u32);
                    }
                }
            }
        }
        components.push(pixels);
    }
    components
}

/// Components of the `weak` mask that contain at least one `strong` pixel
/// (double thresholding).
pub(crate) fn hysteresis_components(
    weak: &[bool],
    strong: &[bool],
    w: usize,
    h: usize,
) -> Vec<Vec<u32>> {
    connected_components(weak, w, h)
        .into_iter()
        .filter(|pixels| pixels.iter().any(|&p| strong[p as usize]))
        .collect()
}

/// Unweighted centroid of a pixel-index set.
pub(crate) fn pixel_centroid(pixels: &[u32], w: usize) -> Point {
    debug_assert!(!pixels.is_empty());
    let n = pixels.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for &p in pixels {
        sx += (p as usize % w) as f64;
        sy += (p as usize / w) as f64;
    }
    Point::new(sx / n, sy / n)
}

/// 8-connected flood fill from `seed` over pixels whose value stays within
/// `tolerance` below the seed value (bright-structure convention), capped at
/// `max_pixels`. Returns the grown pixel set including the seed.
pub(crate) fn region_grow(f: &Field, seed: u32, tolerance: f64, max_pixels: usize) -> Vec<u32> {
    let w = f.w;
    let h = f.h;
    let floor = f.v[seed as usize] - tolerance;
    let mut seen = std::collections::HashSet::new();
    seen.insert(seed);
    let mut queue = vec![seed];
    let mut qi = 0;
    let mut pixels = Vec::new();
    while qi < queue.len() && pixels.len() < max_pixels {
        let p = queue[qi] as usize;
        qi += 1;
        pixels.push(p as u32);
        let px = (p % w) as i64;
        let py = (p / w) as i64;
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = px + dx;
                let ny = py + dy;
                if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                    continue;
                }
                let ni = (ny as usize * w + nx as usize) as u32;
                if f.v[ni as usize] >= floor && seen.insert(ni) {
                    queue.push(ni);
                }
            }
        }
    }
    pixels
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_split_and_count() {
        // two diagonal pixels are 8-connected; a distant one is separate
        let w = 5;
        let h = 3;
        let mut mask = vec![false; w * h];
        mask[0] = true;
        mask[w + 1] = true;
        mask[2 * w + 4] = true;
        let comps = connected_components(&mask, w, h);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].len(), 2);
        assert_eq!(comps[1], vec![(2 * w + 4) as u32]);
    }

    #[test]
    fn hysteresis_keeps_only_seeded_components() {
        let w = 7;
        let h = 1;
        let weak = vec![true, true, false, true, true, false, true];
        let mut strong = vec![false; 7];
        strong[4] = true;
        let comps = hysteresis_components(&weak, &strong, w, h);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0], vec![3, 4]);
    }

    #[test]
    fn centroid_of_plus_shape() {
        let w = 5;
        let pixels = [
            (2 + w) as u32,
            (1 + 2 * w) as u32,
            (2 + 2 * w) as u32,
            (3 + 2 * w) as u32,
            (2 + 3 * w) as u32,
        ];
        let c = pixel_centroid(&pixels, w);
        assert_eq!((c.x, c.y), (2.0, 2.0));
    }

    #[test]
    fn region_grow_stops_at_tolerance_edge() {
        let f = Field {
            w: 7,
            h: 1,
            v: vec![0.0, 8.0, 9.0, 10.0, 9.5, 2.0, 10.0],
        };
        let grown = region_grow(&f, 3, 2.0, 100);
        let mut got = grown.clone();
        got.sort_unstable();
        // pixels 1..=4 are within 2.0 of the seed value 10; 0 and 5 block
        assert_eq!(got, vec![1, 2, 3, 4]);
    }

    #[test]
    fn region_grow_respects_cap() {
        let f = Field::filled(10, 10, 5.0);
        let grown = region_grow(&f, 0, 1.0, 7);
        assert_eq!(grown.len(), 7);
    }
}
