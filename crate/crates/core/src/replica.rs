//! Coupled Monte Carlo replicas.
//!
//! A replica fixes the center positions and one uniform per center. Any
//! appetite law, `alpha` or `delta1` is then applied to the same uniforms, so
//! configurations built from one replica are pathwise coupled.

use rand::Rng;

use crate::allocation::PointConfiguration;
use crate::appetite::AppetiteDistribution;
use crate::error::Result;
use crate::geometry::{sample_poisson, Domain, Point};
use crate::rng::{stream, Purpose};

/// Stream tag for the thinning marks.
const THINNING: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Replica {
    pub index: u64,
    pub centers: Vec<Point>,
    /// Drives the appetite of each center.
    pub uniforms: Vec<f64>,
    /// Independent marks for thinning couplings.
    pub marks: Vec<f64>,
}

impl Replica {
    pub fn sample(domain: &Domain, lambda: f64, palm: bool, seed: u64, index: u64) -> Result<Self> {
        let mut pos = stream(seed, index, Purpose::Positions);
        let centers = sample_poisson(domain, lambda, &mut pos, palm)?;
        let mut app = stream(seed, index, Purpose::Appetites);
        let uniforms = centers.iter().map(|_| app.random::<f64>()).collect();
        let mut aux = stream(seed, index, Purpose::Auxiliary(THINNING));
        let marks = centers.iter().map(|_| aux.random::<f64>()).collect();
        Ok(Self {
            index,
            centers,
            uniforms,
            marks,
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn configuration(&self, dist: &AppetiteDistribution) -> Result<PointConfiguration> {
        dist.validate()?;
        PointConfiguration::from_uniforms(self.centers.clone(), &self.uniforms, dist)
    }

    /// The configuration restricted to centers whose mark is below `keep`.
    /// Lower `keep` gives a subset of the centers kept at higher `keep`.
    pub fn thinned(&self, dist: &AppetiteDistribution, keep: f64) -> Result<PointConfiguration> {
        Ok(self.configuration(dist)?.subset(|i| self.marks[i] < keep))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Boundary;

    #[test]
    fn replicas_are_reproducible_and_coupled() {
        let dom = Domain::cube(2, 10.0, Boundary::Periodic).unwrap();
        let a = Replica::sample(&dom, 1.0, true, 9, 2).unwrap();
        assert_eq!(a, Replica::sample(&dom, 1.0, true, 9, 2).unwrap());
        assert_ne!(a, Replica::sample(&dom, 1.0, true, 9, 3).unwrap());
        assert_eq!(a.centers[0].coords(), &[0.0, 0.0]);

        let d = AppetiteDistribution::new(crate::Family::Exponential { mean: 1.0 }, 0.3, 0.5, 1.0).unwrap();
        let small = a.configuration(&d).unwrap();
        let big = a.configuration(&d.with_alpha(0.6)).unwrap();
        for (x, y) in small.appetites().iter().zip(big.appetites()) {
            assert!((2.0 * x - y).abs() < 1e-12);
        }
        let thin = a.thinned(&d, 0.3).unwrap();
        let thick = a.thinned(&d, 0.7).unwrap();
        assert!(thin.centers().iter().all(|c| thick.centers().contains(c)));
    }
}
