use crate::error::{Error, Result};
use crate::geometry::Domain;

/// Regular grid of cubic cells of side `h` covering the window. Each cell
/// stands for the sites inside it; its center is the representative site.
///
/// Cells are numbered with axis 0 varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteGrid {
    domain: Domain,
    h: f64,
    counts: Vec<usize>,
    strides: Vec<usize>,
}

impl SiteGrid {
    /// `h` must divide every side length (to a relative `1e-9`).
    pub fn new(domain: Domain, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid resolution must be positive, got {h}"
            )));
        }
        let mut counts = Vec::with_capacity(domain.dim());
        for &l in domain.sides() {
            let n = (l / h).round();
            if n < 1.0 || (n * h - l).abs() > 1e-9 * l {
                return Err(Error::InvalidParameter(format!(
                    "grid resolution {h} does not divide side length {l}"
                )));
            }
            counts.push(n as usize);
        }
        let mut strides = Vec::with_capacity(counts.len());
        let mut s = 1usize;
        for &n in &counts {
            strides.push(s);
            s = s
                .checked_mul(n)
                .ok_or_else(|| Error::InvalidParameter("grid has too many cells".into()))?;
        }
        Ok(Self {
            domain,
            h,
            counts,
            strides,
        })
    }

    #[inline]
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// Cells per axis.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim() as i32)
    }

    /// Diagonal of one cell, `h * sqrt(d)`.
    pub fn cell_diagonal(&self) -> f64 {
        self.h * (self.dim() as f64).sqrt()
    }

    #[inline]
    pub fn axis_index(&self, cell: usize, axis: usize) -> usize {
        (cell / self.strides[axis]) % self.counts[axis]
    }

    pub fn multi_index(&self, cell: usize) -> Vec<usize> {
        (0..self.dim()).map(|a| self.axis_index(cell, a)).collect()
    }

    pub fn index_of(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(m, s)| m * s).sum()
    }

    pub fn cell_center_into(&self, cell: usize, out: &mut [f64]) {
        for (axis, o) in out.iter_mut().enumerate() {
            *o = (self.axis_index(cell, axis) as f64 + 0.5) * self.h;
        }
    }

    pub fn cell_center(&self, cell: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.dim()];
        self.cell_center_into(cell, &mut c);
        c
    }

    /// The cell containing the given coordinates (clamped to the window).
    pub fn cell_containing(&self, p: &[f64]) -> usize {
        let mut idx = 0;
        for axis in 0..self.dim() {
            let k = (p[axis] / self.h).floor().max(0.0) as usize;
            idx += k.min(self.counts[axis] - 1) * self.strides[axis];
        }
        idx
    }

    /// Face neighbours (up to `2d`); wraps around on the torus.
    pub fn for_each_neighbor<F: FnMut(usize)>(&self, cell: usize, mut f: F) {
        let periodic = self.domain.is_periodic();
        for axis in 0..self.dim() {
            let n = self.counts[axis];
            if n == 1 {
                continue;
            }
            let k = self.axis_index(cell, axis);
            let s = self.strides[axis];
            if k > 0 {
                f(cell - s);
            } else if periodic && n > 2 {
                f(cell + (n - 1) * s);
            }
            if k + 1 < n {
                f(cell + s);
            } else if periodic && n > 2 {
                f(cell - (n - 1) * s);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Boundary;

    #[test]
    fn resolution_must_divide() {
        let dom = Domain::cube(2, 1.0, Boundary::Open).unwrap();
        assert!(SiteGrid::new(dom.clone(), 0.3).is_err());
        assert!(SiteGrid::new(dom.clone(), 0.0).is_err());
        let g = SiteGrid::new(dom, 0.1).unwrap();
        assert_eq!(g.counts(), &[10, 10]);
        assert_eq!(g.len(), 100);
        assert!((g.cell_volume() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn indexing_round_trips() {
        let dom = Domain::new(vec![3.0, 2.0, 1.0], Boundary::Open).unwrap();
        let g = SiteGrid::new(dom, 0.5).unwrap();
        for cell in 0..g.len() {
            assert_eq!(g.index_of(&g.multi_index(cell)), cell);
            assert_eq!(g.cell_containing(&g.cell_center(cell)), cell);
        }
    }

    #[test]
    fn neighbours() {
        let open = SiteGrid::new(Domain::cube(2, 4.0, Boundary::Open).unwrap(), 1.0).unwrap();
        let mut n = Vec::new();
        open.for_each_neighbor(0, |c| n.push(c));
        n.sort();
        assert_eq!(n, vec![1, 4]);
        let torus = SiteGrid::new(Domain::cube(2, 4.0, Boundary::Periodic).unwrap(), 1.0).unwrap();
        let mut n = Vec::new();
        torus.for_each_neighbor(0, |c| n.push(c));
        n.sort();
        assert_eq!(n, vec![1, 3, 4, 12]);
    }
}
