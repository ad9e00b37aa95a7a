//! Internal scalar raster used as the working buffer between filter and
//! morphology stages. No mask, no range bookkeeping; just dimensions + values.

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Field {
    pub w: usize,
    pub h: usize,
    pub v: Vec<f64>,
}

impl Field {
    pub fn filled(w: usize, h: usize, value: f64) -> Self {
        Field {
            w,
            h,
            v: vec![value; w * h],
        }
    }

    #[inline]
    pub fn idx(&self, x: usize, y: usize) -> usize {
        debug_assert!(x < self.w && y < self.h);
        y * self.w + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.v[self.idx(x, y)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        let i = self.idx(x, y);
        self.v[i] = value;
    }

    /// Value at clamped integer coordinates (replicate border).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let xc = x.clamp(0, self.w as isize - 1) as usize;
        let yc = y.clamp(0, self.h as isize - 1) as usize;
        self.get(xc, yc)
    }

    /// Bilinear sample at sub-pixel coordinates, clamped at the borders.
    pub fn bilinear(&self, x: f64, y: f64) -> f64 {
        let xf = x.floor();
        let yf = y.floor();
        let tx = x - xf;
        let ty = y - yf;
        let x0 = xf as isize;
        let y0 = yf as isize;
        let v00 = self.get_clamped(x0, y0);
        let v10 = self.get_clamped(x0 + 1, y0);
        let v01 = self.get_clamped(x0, y0 + 1);
        let v11 = self.get_clamped(x0 + 1, y0 + 1);
        let top = v00 + (v10 - v00) * tx;
        let bot = v01 + (v11 - v01) * tx;
        top + (bot - top) * ty
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_interpolates_and_clamps() {
        let f = Field {
            w: 2,
            h: 2,
            v: vec![0.0, 10.0, 20.0, 30.0],
        };
        assert_eq!(f.bilinear(0.0, 0.0), 0.0);
        assert_eq!(f.bilinear(0.5, 0.0), 5.0);
        assert_eq!(f.bilinear(0.5, 0.5), 15.0);
        // outside the grid clamps to the nearest pixel
        assert_eq!(f.bilinear(-3.0, -3.0), 0.0);
        assert_eq!(f.bilinear(5.0, 5.0), 30.0);
    }
}
