//! Finite simulation windows, points and Poisson sampling.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the window edges behave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// The box is a torus; distances use the minimum image.
    Periodic,
    /// The box is a plain subset of R^d.
    Open,
}

/// An axis-aligned box `[0, L_1) x ... x [0, L_d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    sides: Vec<f64>,
    boundary: Boundary,
}

impl Domain {
    pub fn new(sides: Vec<f64>, boundary: Boundary) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(bad) = sides.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::InvalidDomain(format!(
                "side lengths must be positive and finite, got {bad}"
            )));
        }
        Ok(Self { sides, boundary })
    }

    /// A cube with `d` equal sides.
    pub fn cube(d: usize, side: f64, boundary: Boundary) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Self::new(vec![side; d], boundary)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    #[inline]
    pub fn sides(&self) -> &[f64] {
        &self.sides
    }

    #[inline]
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    #[inline]
    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().product()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim() && p.coords().iter().zip(&self.sides).all(|(x, l)| *x >= 0.0 && x < l)
    }

    /// Largest distance two points of the window can be apart.
    pub fn max_distance(&self) -> f64 {
        let scale = if self.is_periodic() { 0.5 } else { 1.0 };
        self.sides.iter().map(|l| (scale * l) * (scale * l)).sum::<f64>().sqrt()
    }

    /// Where the added Palm point goes: the box center in open mode, the
    /// corner `(0, ..., 0)` on the torus.
    pub fn palm_origin(&self) -> Point {
        match self.boundary {
            Boundary::Open => Point(self.sides.iter().map(|l| 0.5 * l).collect()),
            Boundary::Periodic => Point(vec![0.0; self.dim()]),
        }
    }

    /// Squared distance between raw coordinate slices. Callers guarantee the
    /// dimensions match.
    #[inline]
    pub fn dist_sq(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        match self.boundary {
            Boundary::Open => {
                for i in 0..a.len() {
                    let dx = a[i] - b[i];
                    s += dx * dx;
                }
            }
            Boundary::Periodic => {
                for i in 0..a.len() {
                    let l = self.sides[i];
                    let mut dx = (a[i] - b[i]).abs();
                    if dx > 0.5 * l {
                        dx = l - dx;
                    }
                    s += dx * dx;
                }
            }
        }
        s
    }

    #[inline]
    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        self.dist_sq(a, b).sqrt()
    }

    /// Wraps a coordinate vector into the box (periodic) or checks it lies
    /// inside (open).
    pub fn normalize(&self, mut coords: Vec<f64>) -> Result<Point> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: coords.len(),
            });
        }
        if self.is_periodic() {
            for (x, l) in coords.iter_mut().zip(&self.sides) {
                *x = x.rem_euclid(*l);
                if *x >= *l {
                    *x = 0.0;
                }
            }
        }
        let p = Point(coords);
        if !self.contains(&p) {
            return Err(Error::InvalidDomain(format!("point {:?} lies outside the window", p.0)));
        }
        Ok(p)
    }
}

/// A site or center: `d` coordinates inside a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Volume of the unit ball in `d` dimensions, `pi^{d/2} / Gamma(d/2 + 1)`.
///
/// Computed through the recurrence `V_d = 2 pi / d * V_{d-2}`, which keeps
/// the small cases exact (`V_1 = 2`, `V_2 = pi`).
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let (mut v, start) = if d % 2 == 0 { (1.0, 2) } else { (2.0, 3) };
    let mut k = start;
    while k <= d {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    Ok(v)
}

/// Euclidean distance, minimum-image on the torus.
pub fn distance(a: &Point, b: &Point, domain: &Domain) -> Result<f64> {
    for p in [a, b] {
        if p.dim() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                found: p.dim(),
            });
        }
    }
    Ok(domain.dist(a.coords(), b.coords()))
}

/// Samples a homogeneous Poisson process of intensity `lambda` in the window.
///
/// With `palm` set, an extra point is placed at [`Domain::palm_origin`] and
/// always sits at index 0.
pub fn sample_poisson<R: Rng + ?Sized>(domain: &Domain, lambda: f64, rng: &mut R, palm: bool) -> Result<Vec<Point>> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "intensity must be positive and finite, got {lambda}"
        )));
    }
    let mean = lambda * domain.volume();
    let count = if mean > 0.0 {
        let dist = Poisson::new(mean).map_err(|e| Error::InvalidParameter(format!("poisson mean {mean}: {e}")))?;
        dist.sample(rng) as usize
    } else {
        0
    };
    let mut points = Vec::with_capacity(count + palm as usize);
    if palm {
        points.push(domain.palm_origin());
    }
    for _ in 0..count {
        let coords = domain.sides().iter().map(|l| rng.random::<f64>() * l).collect();
        points.push(Point(coords));
    }
    Ok(points)
}
