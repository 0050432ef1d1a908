use crate::appetite::AppetiteDistribution;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

/// Centers together with their appetites (same index).
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    centers: Vec<Point>,
    appetites: Vec<f64>,
    /// Truncation level `delta1` the appetites were drawn with (0 = none).
    delta1: f64,
    /// The `alpha` in front of `max(V, delta1)`.
    alpha: f64,
}

impl PointConfiguration {
    pub fn new(centers: Vec<Point>, appetites: Vec<f64>) -> Result<Self> {
        if centers.len() != appetites.len() {
            return Err(Error::InvalidParameter(format!(
                "{} centers but {} appetites",
                centers.len(),
                appetites.len()
            )));
        }
        if let Some(a) = appetites.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "appetite must be finite and >= 0, got {a}"
            )));
        }
        Ok(Self {
            centers,
            appetites,
            delta1: 0.0,
            alpha: 1.0,
        })
    }

    /// Records that the appetites are `alpha * max(V, delta1)`.
    pub fn with_truncation(mut self, delta1: f64, alpha: f64) -> Self {
        self.delta1 = delta1;
        self.alpha = alpha;
        self
    }

    /// Appetites `dist.from_uniform(u_i)` for the given uniforms.
    pub fn from_uniforms(centers: Vec<Point>, uniforms: &[f64], dist: &AppetiteDistribution) -> Result<Self> {
        let appetites = uniforms.iter().map(|&u| dist.from_uniform(u)).collect();
        Ok(Self::new(centers, appetites)?.with_truncation(dist.delta1, dist.alpha))
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn appetites(&self) -> &[f64] {
        &self.appetites
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Lower bound `alpha * delta1` on every appetite.
    pub fn appetite_floor(&self) -> f64 {
        self.alpha * self.delta1
    }

    /// Keeps the centers selected by `keep`, with their appetites.
    pub fn subset<F: Fn(usize) -> bool>(&self, keep: F) -> Self {
        let (centers, appetites) = self
            .centers
            .iter()
            .zip(&self.appetites)
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, (c, a))| (c.clone(), *a))
            .unzip();
        Self {
            centers,
            appetites,
            delta1: self.delta1,
            alpha: self.alpha,
        }
    }

    pub(crate) fn check_domain(&self, domain: &Domain) -> Result<()> {
        for c in &self.centers {
            if c.dim() != domain.dim() {
                return Err(Error::DimensionMismatch {
                    expected: domain.dim(),
                    found: c.dim(),
                });
            }
            if !domain.contains(c) {
                return Err(Error::InvalidDomain(format!(
                    "center {:?} lies outside the window",
                    c.coords()
                )));
            }
        }
        Ok(())
    }
}
