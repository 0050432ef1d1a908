//! The dominating Boolean model.
//!
//! Each center `xi` gets the radius
//!
//! ```text
//! R(xi) = inf { r > 0 : sum of appetites of centers in B[xi, 2r] <= pi_d r^d }
//! ```
//!
//! The appetite sum is a step function of `r` that only changes at half the
//! distances to other centers, so on each step the smallest feasible `r` has
//! a closed form. The sweep below walks the steps in order.

use serde::Serialize;

use crate::allocation::{AllocationResult, PointConfiguration, Site, SiteGrid};
use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, Domain, Point};
use crate::par;
use crate::spatial::SpatialIndex;

/// Smallest `r` in `[0, cap]` with `S(2r) <= pi_d r^d`, given every neighbor
/// within distance `2 cap` as `(distance, appetite)` sorted by distance.
/// `None` when there is no such `r`. An infinite `cap` means the neighbor
/// list is complete.
pub(crate) fn sweep(own: f64, neighbors: &[(f64, f64)], cap: f64, d: usize, ball: f64) -> Option<f64> {
    let inv_d = 1.0 / d as f64;
    let root = |s: f64| (s / ball).powf(inv_d);
    let mut sum = own;
    let mut start = 0.0;
    let mut k = 0;
    loop {
        // absorb every neighbor at exactly this boundary (closed ball)
        while k < neighbors.len() && neighbors[k].0 <= 2.0 * start {
            sum += neighbors[k].1;
            k += 1;
        }
        let candidate = root(sum).max(start);
        match neighbors.get(k) {
            Some(&(next, _)) => {
                if candidate < 0.5 * next && candidate <= cap {
                    return Some(candidate);
                }
                start = 0.5 * next;
                if start > cap {
                    return None;
                }
            }
            None => return (candidate <= cap).then_some(candidate),
        }
    }
}

fn require_truncation(config: &PointConfiguration) -> Result<()> {
    if !(config.delta1() > 0.0) {
        return Err(Error::InvalidParameter(
            "the dominating radius needs truncated appetites (delta1 > 0)".into(),
        ));
    }
    Ok(())
}

fn sorted_neighbors(config: &PointConfiguration, domain: &Domain, idx: usize, within: f64) -> Vec<(f64, f64)> {
    let me = config.centers()[idx].coords();
    let mut out: Vec<(f64, f64)> = config
        .centers()
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != idx)
        .map(|(j, c)| (domain.dist(me, c.coords()), config.appetites()[j]))
        .filter(|(dist, _)| *dist <= within)
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Largest radius the torus admits: the ball `B[xi, 2R]` must not wrap onto
/// itself.
fn periodic_cap(domain: &Domain) -> f64 {
    domain.sides().iter().cloned().fold(f64::INFINITY, f64::min) / 4.0
}

fn check_index(config: &PointConfiguration, domain: &Domain, idx: usize) -> Result<()> {
    require_truncation(config)?;
    if idx >= config.len() {
        return Err(Error::InvalidParameter(format!(
            "center index {idx} out of range ({} centers)",
            config.len()
        )));
    }
    config.check_domain(domain)
}

/// The dominating radius `R(xi)` of center `idx`, by exact sweep.
///
/// Open windows use the centers that are present, so near the wall the value
/// is a lower bound. On a torus the result is `+inf` when `B[xi, 2R]` would
/// wrap around.
pub fn compute_radius(idx: usize, config: &PointConfiguration, domain: &Domain) -> Result<f64> {
    check_index(config, domain, idx)?;
    let d = domain.dim();
    let ball = unit_ball_volume(d)?;
    let cap = if domain.is_periodic() {
        periodic_cap(domain)
    } else {
        f64::INFINITY
    };
    let neighbors = sorted_neighbors(config, domain, idx, 2.0 * cap);
    Ok(sweep(config.appetites()[idx], &neighbors, cap, d, ball).unwrap_or(f64::INFINITY))
}

/// `R~(xi)`: the sweep restricted to `s in [0, cap]`, returning `cap` when no
/// root exists there. Only centers within `2 cap` are looked at.
pub fn compute_radius_truncated(idx: usize, config: &PointConfiguration, domain: &Domain, cap: f64) -> Result<f64> {
    check_index(config, domain, idx)?;
    if !(cap > 0.0) {
        return Err(Error::InvalidParameter(format!("cap must be positive, got {cap}")));
    }
    let d = domain.dim();
    let ball = unit_ball_volume(d)?;
    let neighbors = sorted_neighbors(config, domain, idx, 2.0 * cap);
    Ok(sweep(config.appetites()[idx], &neighbors, cap, d, ball).unwrap_or(cap))
}

/// Centers with their dominating radii.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BooleanModel {
    centers: Vec<Point>,
    radii: Vec<f64>,
    /// `(alpha delta1 / pi_d)^(1/d)`: no radius is smaller.
    b: f64,
    /// Open mode: `B[xi, 2R]` leaves the window, so `R` is only a lower bound.
    truncated: Vec<bool>,
    dim: usize,
}

impl BooleanModel {
    /// A model with given radii; used for constructed instances.
    pub fn from_parts(centers: Vec<Point>, radii: Vec<f64>, dim: usize) -> Result<Self> {
        if centers.len() != radii.len() {
            return Err(Error::InvalidParameter("centers and radii differ in length".into()));
        }
        let b = radii.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(Self {
            truncated: vec![false; centers.len()],
            centers,
            radii,
            b: if b.is_finite() { b } else { 0.0 },
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn min_radius(&self) -> f64 {
        self.b
    }

    pub fn truncated(&self) -> &[bool] {
        &self.truncated
    }

    /// Indices of balls with the infinite-radius sentinel.
    pub fn infinite(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.radii[i].is_finite()).collect()
    }

    /// Same centers, radii multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            radii: self.radii.iter().map(|r| r * factor).collect(),
            b: self.b * factor,
            ..self.clone()
        }
    }
}

/// Computes `R` for every center.
pub fn build_boolean(config: &PointConfiguration, domain: &Domain) -> Result<BooleanModel> {
    config.check_domain(domain)?;
    let d = domain.dim();
    if config.is_empty() {
        return Ok(BooleanModel {
            centers: Vec::new(),
            radii: Vec::new(),
            b: 0.0,
            truncated: Vec::new(),
            dim: d,
        });
    }
    require_truncation(config)?;
    let ball = unit_ball_volume(d)?;
    let b = (config.appetite_floor() / ball).powf(1.0 / d as f64);
    let index = SpatialIndex::new(domain, config.centers(), 2.0);
    let window_cap = if domain.is_periodic() {
        periodic_cap(domain)
    } else {
        f64::INFINITY
    };
    let max_dist = domain.max_distance();
    let start = index.min_bucket_width();

    let radii = par::map_range(config.len(), |i| {
        let p = config.centers()[i].coords();
        let own = config.appetites()[i];
        // Grow the neighborhood until the sweep resolves inside it.
        let mut reach = start;
        loop {
            let complete = reach >= max_dist;
            let cap = if complete {
                window_cap
            } else {
                (0.5 * reach).min(window_cap)
            };
            let query = if complete { max_dist * (1.0 + 1e-12) } else { 2.0 * cap };
            let mut neighbors: Vec<(f64, f64)> = index
                .within(p, query)
                .into_iter()
                .filter(|&(_, j)| j as usize != i)
                .map(|(dist, j)| (dist, config.appetites()[j as usize]))
                .collect();
            neighbors.sort_by(|a, b| a.0.total_cmp(&b.0));
            if let Some(r) = sweep(own, &neighbors, cap, d, ball) {
                return r;
            }
            if complete || cap >= window_cap {
                return f64::INFINITY;
            }
            reach *= 2.0;
        }
    });

    let truncated = if domain.is_periodic() {
        vec![false; config.len()]
    } else {
        config
            .centers()
            .iter()
            .zip(&radii)
            .map(|(c, r)| {
                c.coords()
                    .iter()
                    .zip(domain.sides())
                    .any(|(x, l)| x - 2.0 * r < 0.0 || x + 2.0 * r > *l)
            })
            .collect()
    };

    Ok(BooleanModel {
        centers: config.centers().to_vec(),
        radii,
        b,
        truncated,
        dim: d,
    })
}

/// A claimed cell lying outside its center's ball (plus grid slack).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationViolation {
    pub cell: usize,
    pub center: usize,
    pub distance: f64,
    pub radius: f64,
}

/// Checks that every claimed cell lies within `R + h sqrt(d)` of its center.
/// Truncated and infinite balls are skipped.
pub fn check_domination(
    alloc: &AllocationResult,
    model: &BooleanModel,
    config: &PointConfiguration,
    grid: &SiteGrid,
) -> Result<Vec<DominationViolation>> {
    if model.len() != config.len() || alloc.num_centers() != config.len() {
        return Err(Error::Mismatch(format!(
            "model has {} centers, allocation {}, configuration {}",
            model.len(),
            alloc.num_centers(),
            config.len()
        )));
    }
    if model.centers.iter().zip(config.centers()).any(|(a, b)| a != b) {
        return Err(Error::Mismatch("model and configuration centers differ".into()));
    }
    if alloc.assignment().len() != grid.len() {
        return Err(Error::Mismatch("allocation and grid differ in size".into()));
    }
    let domain = grid.domain();
    let slack = grid.cell_diagonal();
    let mut out = Vec::new();
    let mut pos = vec![0.0; grid.dim()];
    for (cell, site) in alloc.assignment().iter().enumerate() {
        let Site::Center(c) = *site else { continue };
        let c = c as usize;
        let radius = model.radii[c];
        if model.truncated[c] || !radius.is_finite() {
            continue;
        }
        grid.cell_center_into(cell, &mut pos);
        let distance = domain.dist(&pos, config.centers()[c].coords());
        if distance > radius + slack {
            out.push(DominationViolation {
                cell,
                center: c,
                distance,
                radius,
            });
        }
    }
    Ok(out)
}

/// Pooled radius statistics over several models.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailStatistics {
    pub samples: usize,
    pub dim: usize,
    /// Log-spaced evaluation points.
    pub grid: Vec<f64>,
    /// `P[R > r]` on the grid.
    pub survival: Vec<f64>,
    /// `r^d P[R >= r]` on the grid.
    pub weighted: Vec<f64>,
    /// `sup_r r^d P[R >= r]`, exact over the sample.
    pub sup_statistic: f64,
    pub argsup: f64,
    /// Least-squares slope of `log P[R > r]` against `log r` over the upper
    /// decade of observed radii, when at least three points are available.
    pub tail_slope: Option<f64>,
}

/// Empirical survival function of pooled radii, excluding truncated and
/// infinite balls.
pub fn tail_statistics(models: &[BooleanModel]) -> Result<TailStatistics> {
    let dim = models
        .first()
        .map(|m| m.dim)
        .ok_or_else(|| Error::InsufficientData("no models".into()))?;
    let mut radii: Vec<f64> = models
        .iter()
        .flat_map(|m| {
            m.radii
                .iter()
                .zip(&m.truncated)
                .filter(|(r, t)| !**t && r.is_finite())
                .map(|(r, _)| *r)
        })
        .collect();
    if radii.is_empty() {
        return Err(Error::InsufficientData("every ball is truncated or infinite".into()));
    }
    radii.sort_by(f64::total_cmp);
    let n = radii.len();
    let nf = n as f64;
    let dpow = |r: f64| r.powi(dim as i32);

    // sup over r of r^d * #{R >= r} / n is attained at a sample value
    let mut sup_statistic = 0.0;
    let mut argsup = radii[0];
    let mut i = 0;
    while i < n {
        let r = radii[i];
        let value = dpow(r) * (n - i) as f64 / nf;
        if value > sup_statistic {
            sup_statistic = value;
            argsup = r;
        }
        while i < n && radii[i] == r {
            i += 1;
        }
    }

    let lo = radii[0];
    let hi = radii[n - 1];
    let points = 64;
    let grid: Vec<f64> = if hi > lo && lo > 0.0 {
        let ratio = (hi / lo).ln();
        (0..points)
            .map(|k| lo * (ratio * k as f64 / (points - 1) as f64).exp())
            .collect()
    } else {
        vec![lo]
    };
    let count_gt = |r: f64| n - radii.partition_point(|&x| x <= r);
    let count_ge = |r: f64| n - radii.partition_point(|&x| x < r);
    let survival: Vec<f64> = grid.iter().map(|&r| count_gt(r) as f64 / nf).collect();
    let weighted: Vec<f64> = grid.iter().map(|&r| dpow(r) * count_ge(r) as f64 / nf).collect();

    let (xs, ys): (Vec<f64>, Vec<f64>) = grid
        .iter()
        .zip(&survival)
        .filter(|(r, s)| **r >= hi / 10.0 && **s > 0.0)
        .map(|(r, s)| (r.ln(), s.ln()))
        .unzip();
    let tail_slope = if xs.len() >= 3 {
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    } else {
        None
    };

    Ok(TailStatistics {
        samples: n,
        dim,
        grid,
        survival,
        weighted,
        sup_statistic,
        argsup,
        tail_slope,
    })
}

/// Checks the defining property of a computed radius: the appetite sum
/// condition holds at `R` and fails just below it.
pub fn radius_certificate(idx: usize, radius: f64, config: &PointConfiguration, domain: &Domain) -> Result<bool> {
    check_index(config, domain, idx)?;
    if !radius.is_finite() {
        return Ok(true);
    }
    let d = domain.dim();
    let ball = unit_ball_volume(d)?;
    let me = config.centers()[idx].coords();
    let mass = |r: f64| -> f64 {
        config
            .centers()
            .iter()
            .zip(config.appetites())
            .filter(|(c, _)| domain.dist(me, c.coords()) <= 2.0 * r)
            .map(|(_, a)| *a)
            .sum()
    };
    let tol = 1e-9 * radius.max(1e-12);
    let feasible_at = mass(radius) <= ball * radius.powi(d as i32) * (1.0 + 1e-12) + 1e-15;
    let below = (radius - tol).max(0.0);
    let infeasible_below = radius - tol <= 0.0 || mass(below) > ball * below.powi(d as i32);
    Ok(feasible_at && infeasible_below)
}
