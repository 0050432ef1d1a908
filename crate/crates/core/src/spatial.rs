//! Uniform bucket grid over a set of points for radius queries.
//!
//! Queries return exactly the points within the requested radius, so callers
//! get the same answer as a linear scan; the buckets only prune work.

use crate::geometry::{Domain, Point};

#[derive(Debug, Clone)]
pub struct SpatialIndex {
    domain: Domain,
    dim: usize,
    /// Flat coordinates, `dim` per point.
    coords: Vec<f64>,
    buckets_per_axis: Vec<usize>,
    bucket_width: Vec<f64>,
    /// CSR layout: points of bucket `b` are `items[starts[b]..starts[b + 1]]`.
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl SpatialIndex {
    /// Builds an index with about `per_bucket` points per bucket.
    pub fn new(domain: &Domain, points: &[Point], per_bucket: f64) -> Self {
        let dim = domain.dim();
        let n = points.len().max(1) as f64;
        let target = (per_bucket.max(0.5) * domain.volume() / n).powf(1.0 / dim as f64);
        let buckets_per_axis: Vec<usize> = domain
            .sides()
            .iter()
            .map(|l| ((l / target).floor() as usize).clamp(1, 4096))
            .collect();
        let bucket_width: Vec<f64> = domain
            .sides()
            .iter()
            .zip(&buckets_per_axis)
            .map(|(l, nb)| l / *nb as f64)
            .collect();
        let total: usize = buckets_per_axis.iter().product();

        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            coords.extend_from_slice(p.coords());
        }
        let mut index = Self {
            domain: domain.clone(),
            dim,
            coords,
            buckets_per_axis,
            bucket_width,
            starts: vec![0; total + 1],
            items: vec![0; points.len()],
        };
        let bucket_of: Vec<usize> = (0..points.len())
            .map(|i| index.bucket_of(&index.coords[i * dim..(i + 1) * dim]))
            .collect();
        for &b in &bucket_of {
            index.starts[b + 1] += 1;
        }
        for b in 0..total {
            index.starts[b + 1] += index.starts[b];
        }
        let mut fill = index.starts.clone();
        for (i, &b) in bucket_of.iter().enumerate() {
            index.items[fill[b] as usize] = i as u32;
            fill[b] += 1;
        }
        index
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Smallest bucket side; a natural initial search radius.
    pub fn min_bucket_width(&self) -> f64 {
        self.bucket_width.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn axis_bucket(&self, axis: usize, x: f64) -> usize {
        let b = (x / self.bucket_width[axis]).floor();
        if b < 0.0 {
            0
        } else {
            (b as usize).min(self.buckets_per_axis[axis] - 1)
        }
    }

    fn bucket_of(&self, p: &[f64]) -> usize {
        let mut b = 0;
        for axis in (0..self.dim).rev() {
            b = b * self.buckets_per_axis[axis] + self.axis_bucket(axis, p[axis]);
        }
        b
    }

    /// Calls `visit(index, distance)` for every point with distance `<= radius`.
    pub fn for_each_within<F: FnMut(usize, f64)>(&self, p: &[f64], radius: f64, mut visit: F) {
        if self.items.is_empty() {
            return;
        }
        let periodic = self.domain.is_periodic();
        // Per axis, the list of bucket coordinates to visit.
        let mut ranges: Vec<Vec<usize>> = Vec::with_capacity(self.dim);
        for axis in 0..self.dim {
            let nb = self.buckets_per_axis[axis] as i64;
            let w = self.bucket_width[axis];
            let lo = ((p[axis] - radius) / w).floor() as i64;
            let hi = ((p[axis] + radius) / w).floor() as i64;
            let axis_range: Vec<usize> = if periodic {
                if hi - lo + 1 >= nb {
                    (0..nb as usize).collect()
                } else {
                    (lo..=hi).map(|b| b.rem_euclid(nb) as usize).collect()
                }
            } else {
                let lo = lo.max(0);
                let hi = hi.min(nb - 1);
                if lo > hi {
                    return;
                }
                (lo as usize..=hi as usize).collect()
            };
            ranges.push(axis_range);
        }
        let r2 = radius * radius;
        let mut cursor = vec![0usize; self.dim];
        loop {
            let mut b = 0;
            for axis in (0..self.dim).rev() {
                b = b * self.buckets_per_axis[axis] + ranges[axis][cursor[axis]];
            }
            for &item in &self.items[self.starts[b] as usize..self.starts[b + 1] as usize] {
                let i = item as usize;
                let d2 = self.domain.dist_sq(p, self.point(i));
                if d2 <= r2 {
                    visit(i, d2.sqrt());
                }
            }
            // odometer
            let mut axis = 0;
            loop {
                cursor[axis] += 1;
                if cursor[axis] < ranges[axis].len() {
                    break;
                }
                cursor[axis] = 0;
                axis += 1;
                if axis == self.dim {
                    return;
                }
            }
        }
    }

    /// All points within `radius` as `(distance, index)`, unsorted.
    pub fn within(&self, p: &[f64], radius: f64) -> Vec<(f64, u32)> {
        let mut out = Vec::new();
        self.for_each_within(p, radius, |i, d| out.push((d, i as u32)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_poisson, Boundary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for boundary in [Boundary::Open, Boundary::Periodic] {
            for d in 1..=3 {
                let dom = Domain::new((0..d).map(|k| 6.0 + k as f64).collect(), boundary).unwrap();
                let pts = sample_poisson(&dom, 2.0, &mut rng, false).unwrap();
                let index = SpatialIndex::new(&dom, &pts, 1.5);
                for _ in 0..50 {
                    let q: Vec<f64> = dom.sides().iter().map(|l| rng.random::<f64>() * l).collect();
                    let r = rng.random::<f64>() * 8.0;
                    let mut got: Vec<u32> = index.within(&q, r).into_iter().map(|(_, i)| i).collect();
                    got.sort_unstable();
                    let want: Vec<u32> = (0..pts.len() as u32)
                        .filter(|&i| dom.dist(&q, pts[i as usize].coords()) <= r)
                        .collect();
                    assert_eq!(got, want, "d={d} {boundary:?} r={r}");
                }
            }
        }
    }

    #[test]
    fn empty_index() {
        let dom = Domain::cube(2, 3.0, Boundary::Open).unwrap();
        let index = SpatialIndex::new(&dom, &[], 1.0);
        assert!(index.within(&[1.0, 1.0], 10.0).is_empty());
    }
}
