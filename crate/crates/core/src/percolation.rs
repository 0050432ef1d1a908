//! Connected components of the Boolean model and of the claimed set, box
//! crossings, and the critical-alpha sweep.
//!
//! Crossing flags are only meaningful in open windows: a component crosses
//! axis `k` when it touches both faces orthogonal to `k`. On a torus every
//! crossing flag is `false`.

use serde::Serialize;

use crate::allocation::{gale_shapley, phase_diagnostics, AllocationResult, Site, SiteGrid};
use crate::appetite::AppetiteDistribution;
use crate::boolean::BooleanModel;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::par;
use crate::replica::Replica;
use crate::spatial::SpatialIndex;

/// Disjoint sets with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let up = self.parent[self.parent[x] as usize];
            self.parent[x] = up;
            x = up as usize;
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] || (self.size[ra] == self.size[rb] && rb < ra) {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        true
    }

    /// Labels `0..k` for the members, numbered by first appearance.
    fn labels(&mut self, member: impl Fn(usize) -> bool) -> (Vec<Option<u32>>, usize) {
        let n = self.parent.len();
        let mut by_root = vec![u32::MAX; n];
        let mut labels = vec![None; n];
        let mut next = 0u32;
        for i in 0..n {
            if !member(i) {
                continue;
            }
            let r = self.find(i);
            if by_root[r] == u32::MAX {
                by_root[r] = next;
                next += 1;
            }
            labels[i] = Some(by_root[r]);
        }
        (labels, next as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentSummary {
    /// Number of balls or cells.
    pub size: usize,
    /// Bounding box, clipped to the window (coordinates for balls, cell
    /// centers for grids).
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub crossing: Vec<bool>,
}

/// Statistics of the component containing the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OriginCluster {
    pub component: usize,
    /// Largest distance from the origin to a point of the component.
    pub m: f64,
    /// Diameter of the component.
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    /// Component of each ball or cell; `None` for cells outside the set.
    pub labels: Vec<Option<u32>>,
    pub components: Vec<ComponentSummary>,
    /// Per axis: some component crosses it.
    pub crossing: Vec<bool>,
    pub origin: Option<OriginCluster>,
    /// Some component crosses the window along some axis.
    pub percolates: bool,
}

impl ClusterReport {
    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn largest(&self) -> usize {
        self.components.iter().map(|c| c.size).max().unwrap_or(0)
    }

    fn finish(
        labels: Vec<Option<u32>>,
        components: Vec<ComponentSummary>,
        origin: Option<OriginCluster>,
        dim: usize,
    ) -> Self {
        let crossing: Vec<bool> = (0..dim).map(|k| components.iter().any(|c| c.crossing[k])).collect();
        let percolates = crossing.iter().any(|&c| c);
        Self {
            labels,
            components,
            crossing,
            origin,
            percolates,
        }
    }
}

/// Components of the union of balls. Balls `i` and `j` touch iff
/// `|xi_i - xi_j| < R_i + R_j`; tangent balls stay apart.
pub fn ball_components(model: &BooleanModel, domain: &Domain) -> Result<ClusterReport> {
    if let Some(&index) = model.infinite().first() {
        return Err(Error::InfiniteRadius { index });
    }
    if model.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            found: model.dim(),
        });
    }
    let uf = link_balls(model.centers(), model.radii(), domain);
    Ok(summarize_balls(uf, model.centers(), model.radii(), domain))
}

fn link_balls(centers: &[Point], radii: &[f64], domain: &Domain) -> UnionFind {
    let n = centers.len();
    let mut uf = UnionFind::new(n);
    if n == 0 {
        return uf;
    }
    let index = SpatialIndex::new(domain, centers, 2.0);
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    let neighbors = par::map_range(n, |i| {
        let mut out = Vec::new();
        index.for_each_within(centers[i].coords(), radii[i] + r_max, |j, d| {
            if j > i && d < radii[i] + radii[j] {
                out.push(j);
            }
        });
        out
    });
    for (i, list) in neighbors.into_iter().enumerate() {
        for j in list {
            uf.union(i, j);
        }
    }
    uf
}

fn summarize_balls(mut uf: UnionFind, centers: &[Point], radii: &[f64], domain: &Domain) -> ClusterReport {
    let dim = domain.dim();
    let (labels, k) = uf.labels(|_| true);
    let mut comps: Vec<ComponentSummary> = (0..k)
        .map(|_| ComponentSummary {
            size: 0,
            lo: vec![f64::INFINITY; dim],
            hi: vec![f64::NEG_INFINITY; dim],
            crossing: vec![false; dim],
        })
        .collect();
    for (i, label) in labels.iter().enumerate() {
        let Some(l) = label else { continue };
        let c = &mut comps[*l as usize];
        c.size += 1;
        for a in 0..dim {
            let x = centers[i].coords()[a];
            c.lo[a] = c.lo[a].min((x - radii[i]).max(0.0));
            c.hi[a] = c.hi[a].max((x + radii[i]).min(domain.sides()[a]));
        }
    }
    if !domain.is_periodic() {
        for c in &mut comps {
            for a in 0..dim {
                c.crossing[a] = c.lo[a] <= 0.0 && c.hi[a] >= domain.sides()[a];
            }
        }
    }

    let o = domain.palm_origin();
    let origin = (0..centers.len())
        .find(|&i| labels[i].is_some() && domain.dist(o.coords(), centers[i].coords()) <= radii[i])
        .map(|seed| {
            let comp = labels[seed].unwrap();
            let members: Vec<usize> = (0..centers.len()).filter(|&i| labels[i] == Some(comp)).collect();
            let m = members
                .iter()
                .map(|&i| domain.dist(o.coords(), centers[i].coords()) + radii[i])
                .fold(0.0, f64::max);
            let mut d = 0.0f64;
            for (a, &i) in members.iter().enumerate() {
                d = d.max(2.0 * radii[i]);
                for &j in &members[a + 1..] {
                    d = d.max(domain.dist(centers[i].coords(), centers[j].coords()) + radii[i] + radii[j]);
                }
            }
            OriginCluster {
                component: comp as usize,
                m,
                d,
            }
        });
    ClusterReport::finish(labels, comps, origin, dim)
}

fn grid_components(grid: &SiteGrid, member: &[bool]) -> ClusterReport {
    let dim = grid.dim();
    let mut uf = UnionFind::new(grid.len());
    for cell in 0..grid.len() {
        if !member[cell] {
            continue;
        }
        grid.for_each_neighbor(cell, |nb| {
            if nb > cell && member[nb] {
                uf.union(cell, nb);
            }
        });
    }
    let (labels, k) = uf.labels(|i| member[i]);
    let counts = grid.counts();
    let mut lo_idx = vec![vec![usize::MAX; dim]; k];
    let mut hi_idx = vec![vec![0usize; dim]; k];
    let mut sizes = vec![0usize; k];
    for (cell, label) in labels.iter().enumerate() {
        let Some(l) = label else { continue };
        let l = *l as usize;
        sizes[l] += 1;
        for a in 0..dim {
            let i = grid.axis_index(cell, a);
            lo_idx[l][a] = lo_idx[l][a].min(i);
            hi_idx[l][a] = hi_idx[l][a].max(i);
        }
    }
    let h = grid.h();
    let periodic = grid.domain().is_periodic();
    let comps: Vec<ComponentSummary> = (0..k)
        .map(|l| ComponentSummary {
            size: sizes[l],
            lo: lo_idx[l].iter().map(|&i| (i as f64 + 0.5) * h).collect(),
            hi: hi_idx[l].iter().map(|&i| (i as f64 + 0.5) * h).collect(),
            crossing: (0..dim)
                .map(|a| !periodic && lo_idx[l][a] == 0 && hi_idx[l][a] == counts[a] - 1)
                .collect(),
        })
        .collect();

    let domain = grid.domain();
    let origin_cell = grid.cell_containing(domain.palm_origin().coords());
    let origin = labels[origin_cell].map(|comp| {
        let o = grid.cell_center(origin_cell);
        let mut pos = vec![0.0; dim];
        let mut m = 0.0f64;
        let mut far = origin_cell;
        // extremes of every line along axis 0 hold all hull vertices
        let mut extremes = Vec::new();
        let n0 = counts[0];
        for line in (0..grid.len()).step_by(n0) {
            let cells = line..line + n0;
            let first = cells.clone().find(|&c| labels[c] == Some(comp));
            let last = cells.rev().find(|&c| labels[c] == Some(comp));
            extremes.extend(first);
            extremes.extend(last.filter(|l| Some(*l) != first));
        }
        for (cell, label) in labels.iter().enumerate() {
            if *label == Some(comp) {
                grid.cell_center_into(cell, &mut pos);
                let dist = domain.dist(&o, &pos);
                if dist > m {
                    m = dist;
                    far = cell;
                }
            }
        }
        extremes.push(origin_cell);
        extremes.push(far);
        let points: Vec<Vec<f64>> = extremes.iter().map(|&c| grid.cell_center(c)).collect();
        let mut d = 0.0f64;
        for (a, p) in points.iter().enumerate() {
            for q in &points[a + 1..] {
                d = d.max(domain.dist(p, q));
            }
        }
        OriginCluster {
            component: comp as usize,
            m,
            d,
        }
    });
    ClusterReport::finish(labels, comps, origin, dim)
}

/// Components of the closure of the claimed set under face adjacency. Tie
/// cells lie on territory boundaries and count as part of it.
///
/// For the origin statistics, distances are measured between cell centers,
/// starting from the cell containing the origin.
pub fn claimed_components(alloc: &AllocationResult, grid: &SiteGrid) -> Result<ClusterReport> {
    check_grid(alloc, grid)?;
    let member: Vec<bool> = alloc.assignment().iter().map(|s| *s != Site::Unclaimed).collect();
    Ok(grid_components(grid, &member))
}

/// Components of the unclaimed cells.
pub fn unclaimed_components(alloc: &AllocationResult, grid: &SiteGrid) -> Result<ClusterReport> {
    check_grid(alloc, grid)?;
    let member: Vec<bool> = alloc.assignment().iter().map(|s| *s == Site::Unclaimed).collect();
    Ok(grid_components(grid, &member))
}

fn check_grid(alloc: &AllocationResult, grid: &SiteGrid) -> Result<()> {
    if alloc.assignment().len() != grid.len() {
        return Err(Error::Mismatch(format!(
            "allocation has {} cells, grid has {}",
            alloc.assignment().len(),
            grid.len()
        )));
    }
    Ok(())
}

/// Whether balls with radii in `[gamma, beta]` connect `B(x, beta)` to the
/// outside of `B(x, 2 beta)`.
///
/// Only balls centered within `3 beta` of `x` can take part before the path
/// first leaves `B(x, 2 beta)`, so the window must contain `B(x, 3 beta)`.
pub fn crossing_event_g(model: &BooleanModel, domain: &Domain, x: &Point, gamma: f64, beta: f64) -> Result<bool> {
    if !(beta > 0.0 && gamma >= 0.0 && gamma.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= gamma and beta > 0 (got {gamma}, {beta})"
        )));
    }
    if x.dim() != domain.dim() || model.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            found: x.dim(),
        });
    }
    let reach = 3.0 * beta;
    let fits = if domain.is_periodic() {
        domain.sides().iter().all(|&l| 2.0 * reach <= l)
    } else {
        x.coords()
            .iter()
            .zip(domain.sides())
            .all(|(&c, &l)| c - reach >= 0.0 && c + reach <= l)
    };
    if !fits {
        return Err(Error::WindowTooSmall(format!(
            "the window does not contain B(x, {reach})"
        )));
    }

    let keep: Vec<usize> = (0..model.len())
        .filter(|&i| {
            let r = model.radii()[i];
            r >= gamma && r <= beta && domain.dist(x.coords(), model.centers()[i].coords()) < reach
        })
        .collect();
    if keep.is_empty() {
        return Ok(false);
    }
    let centers: Vec<Point> = keep.iter().map(|&i| model.centers()[i].clone()).collect();
    let radii: Vec<f64> = keep.iter().map(|&i| model.radii()[i]).collect();
    let mut uf = link_balls(&centers, &radii, domain);
    let n = centers.len();
    let mut inner = vec![false; n];
    let mut outer = vec![false; n];
    for i in 0..n {
        let dist = domain.dist(x.coords(), centers[i].coords());
        let r = uf.find(i);
        inner[r] |= dist < beta + radii[i];
        outer[r] |= dist + radii[i] > 2.0 * beta;
    }
    Ok((0..n).any(|i| inner[i] && outer[i]))
}

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// How the sweep spends allocations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepStrategy {
    /// Every replica at every alpha. Checks monotonicity along the way.
    Exhaustive,
    /// Per replica, binary search for the first crossing alpha, relying on
    /// the coupled indicator being nondecreasing. Claimed fractions and
    /// complement crossings are only known at the alphas visited.
    Bisection,
}

/// Everything fixed across the sweep except `alpha`.
#[derive(Debug, Clone)]
pub struct SweepTemplate {
    pub domain: Domain,
    pub lambda: f64,
    pub h: f64,
    pub appetite: AppetiteDistribution,
    pub palm: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub replicas: usize,
    pub crossings: usize,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// Mean claimed fraction over the replicas evaluated at this alpha.
    pub mean_claimed_fraction: Option<f64>,
    /// Replicas whose unclaimed set crosses the window, among those evaluated.
    pub complement_crossings: Option<usize>,
    pub evaluated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Adjacent grid values where the crossing estimate first reaches 1/2.
    pub bracket: Option<(f64, f64)>,
    /// Replicas whose crossing indicator decreased somewhere along the grid
    /// (always 0 under bisection, which assumes monotonicity).
    pub monotonicity_violations: usize,
    /// Crossing indicator per replica and alpha.
    pub indicators: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, Copy)]
struct Eval {
    crosses: bool,
    claimed: f64,
    complement: bool,
}

fn evaluate(t: &SweepTemplate, grid: &SiteGrid, replica: &Replica, alpha: f64) -> Result<Eval> {
    let config = replica.configuration(&t.appetite.with_alpha(alpha))?;
    let alloc = gale_shapley(&config, grid)?;
    let claimed = claimed_components(&alloc, grid)?;
    let unclaimed = unclaimed_components(&alloc, grid)?;
    let diag = phase_diagnostics(&alloc, &config, grid)?;
    Ok(Eval {
        crosses: claimed.percolates,
        claimed: diag.claimed_volume_fraction,
        complement: unclaimed.percolates,
    })
}

/// Crossing probability of the claimed set over an ascending alpha grid,
/// with coupled replicas (same centers and uniforms at every alpha).
pub fn critical_sweep(
    template: &SweepTemplate,
    alphas: &[f64],
    replicas: usize,
    strategy: SweepStrategy,
) -> Result<SweepTable> {
    if template.domain.is_periodic() {
        return Err(Error::InvalidDomain("crossing sweeps need an open window".into()));
    }
    if alphas.is_empty() || alphas.windows(2).any(|w| !(w[0] < w[1])) || alphas[0] < 0.0 {
        return Err(Error::InvalidParameter(
            "alpha grid must be nonnegative and strictly ascending".into(),
        ));
    }
    template.appetite.validate()?;
    let grid = SiteGrid::new(template.domain.clone(), template.h)?;
    let m = alphas.len();

    let per_replica: Vec<Result<(Vec<Option<Eval>>, Vec<bool>)>> = par::map_range(replicas, |r| {
        let replica = Replica::sample(
            &template.domain,
            template.lambda,
            template.palm,
            template.seed,
            r as u64,
        )?;
        let mut evals: Vec<Option<Eval>> = vec![None; m];
        let indicator = match strategy {
            SweepStrategy::Exhaustive => {
                for (i, &alpha) in alphas.iter().enumerate() {
                    evals[i] = Some(evaluate(template, &grid, &replica, alpha)?);
                }
                evals.iter().map(|e| e.is_some_and(|e| e.crosses)).collect()
            }
            SweepStrategy::Bisection => {
                // first crossing index lies in [lo, hi]; m means never
                let (mut lo, mut hi) = (0usize, m);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    let e = evaluate(template, &grid, &replica, alphas[mid])?;
                    evals[mid] = Some(e);
                    if e.crosses {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                (0..m).map(|i| i >= lo).collect()
            }
        };
        Ok((evals, indicator))
    });
    let (per_replica, indicators): (Vec<Vec<Option<Eval>>>, Vec<Vec<bool>>) =
        per_replica.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    let monotonicity_violations = indicators
        .iter()
        .filter(|ind| ind.windows(2).any(|w| w[0] && !w[1]))
        .count();

    let rows: Vec<SweepRow> = (0..m)
        .map(|i| {
            let crossings = indicators.iter().filter(|ind| ind[i]).count();
            let seen: Vec<Eval> = per_replica.iter().filter_map(|e| e[i]).collect();
            let (ci_lo, ci_hi) = wilson_interval(crossings, replicas, 1.96);
            SweepRow {
                alpha: alphas[i],
                replicas,
                crossings,
                p_hat: if replicas > 0 {
                    crossings as f64 / replicas as f64
                } else {
                    0.0
                },
                ci_lo,
                ci_hi,
                mean_claimed_fraction: (!seen.is_empty())
                    .then(|| seen.iter().map(|e| e.claimed).sum::<f64>() / seen.len() as f64),
                complement_crossings: (!seen.is_empty()).then(|| seen.iter().filter(|e| e.complement).count()),
                evaluated: seen.len(),
            }
        })
        .collect();
    let bracket = rows
        .iter()
        .position(|r| r.p_hat >= 0.5)
        .filter(|&i| i > 0)
        .map(|i| (alphas[i - 1], alphas[i]));

    Ok(SweepTable {
        rows,
        bracket,
        monotonicity_violations,
        indicators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::PointConfiguration;
    use crate::geometry::Boundary;

    fn model(points: &[&[f64]], radii: &[f64]) -> BooleanModel {
        let d = points.first().map_or(1, |p| p.len());
        BooleanModel::from_parts(
            points.iter().map(|p| Point::new(p.to_vec())).collect(),
            radii.to_vec(),
            d,
        )
        .unwrap()
    }

    #[test]
    fn collinear_balls_join() {
        let dom = Domain::cube(1, 10.0, Boundary::Open).unwrap();
        let m = model(&[&[2.0], &[3.5], &[5.0]], &[1.0, 1.0, 1.0]);
        let rep = ball_components(&m, &dom).unwrap();
        assert_eq!(rep.num_components(), 1);
        assert!(!rep.percolates);
        assert_eq!(rep.origin.unwrap().m, 4.0);
        assert_eq!(rep.origin.unwrap().d, 5.0);
    }

    #[test]
    fn tangent_balls_stay_apart() {
        let dom = Domain::cube(1, 10.0, Boundary::Open).unwrap();
        let m = model(&[&[2.0], &[4.0]], &[1.0, 1.0]);
        assert_eq!(ball_components(&m, &dom).unwrap().num_components(), 2);
    }

    #[test]
    fn infinite_radius_rejected() {
        let dom = Domain::cube(1, 10.0, Boundary::Open).unwrap();
        let m = model(&[&[2.0]], &[f64::INFINITY]);
        assert!(matches!(
            ball_components(&m, &dom),
            Err(Error::InfiniteRadius { index: 0 })
        ));
    }

    #[test]
    fn full_and_empty_grids() {
        let dom = Domain::cube(2, 4.0, Boundary::Open).unwrap();
        let grid = SiteGrid::new(dom, 0.5).unwrap();
        let cfg = PointConfiguration::new(vec![], vec![]).unwrap();
        let all = AllocationResult::from_assignment(vec![Site::Tie; grid.len()], &cfg, &grid).unwrap();
        let rep = claimed_components(&all, &grid).unwrap();
        assert_eq!(rep.num_components(), 1);
        assert_eq!(rep.crossing, vec![true, true]);
        assert!(unclaimed_components(&all, &grid).unwrap().num_components() == 0);
        let none = AllocationResult::from_assignment(vec![Site::Unclaimed; grid.len()], &cfg, &grid).unwrap();
        let rep = claimed_components(&none, &grid).unwrap();
        assert_eq!(rep.num_components(), 0);
        assert!(!rep.percolates);
        assert!(rep.origin.is_none());
    }

    #[test]
    fn g_event_examples() {
        let dom = Domain::cube(2, 20.0, Boundary::Open).unwrap();
        let x = Point::new(vec![10.0, 10.0]);
        let empty = BooleanModel::from_parts(vec![], vec![], 2).unwrap();
        assert!(!crossing_event_g(&empty, &dom, &x, 0.0, 2.0).unwrap());
        let single = model(&[&[10.0, 10.0]], &[2.0]);
        assert!(!crossing_event_g(&single, &dom, &x, 0.0, 2.0).unwrap());
        // chain from x out to 2.5 beta
        let pts: Vec<Vec<f64>> = (0..6).map(|k| vec![10.0 + k as f64, 10.0]).collect();
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let chain = model(&refs, &[0.8; 6]);
        assert!(crossing_event_g(&chain, &dom, &x, 0.0, 2.0).unwrap());
        // the same chain with radii outside [gamma, beta] does nothing
        assert!(!crossing_event_g(&chain, &dom, &x, 0.9, 2.0).unwrap());
        assert!(matches!(
            crossing_event_g(&chain, &dom, &x, 0.0, 4.0),
            Err(Error::WindowTooSmall(_))
        ));
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100, 1.96);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.0370).abs() < 1e-3);
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn sweep_strategies_agree() {
        let template = SweepTemplate {
            domain: Domain::cube(2, 8.0, Boundary::Open).unwrap(),
            lambda: 1.0,
            h: 0.25,
            appetite: AppetiteDistribution::constant(1.0, 0.0, 1.0).unwrap(),
            palm: false,
            seed: 4,
        };
        let alphas = [0.0, 0.3, 0.6, 0.9, 1.2, 2.0];
        let ex = critical_sweep(&template, &alphas, 12, SweepStrategy::Exhaustive).unwrap();
        let bi = critical_sweep(&template, &alphas, 12, SweepStrategy::Bisection).unwrap();
        assert_eq!(ex.monotonicity_violations, 0);
        assert_eq!(ex.indicators, bi.indicators);
        assert_eq!(ex.rows[0].crossings, 0);
        assert_eq!(ex.rows[5].crossings, 12);
        assert_eq!(ex.rows[0].mean_claimed_fraction, Some(0.0));
        assert!(bi.rows.iter().map(|r| r.evaluated).sum::<usize>() < 12 * alphas.len());
        assert!(ex.bracket.is_some());
        let periodic = SweepTemplate {
            domain: Domain::cube(2, 8.0, Boundary::Periodic).unwrap(),
            ..template
        };
        assert!(critical_sweep(&periodic, &alphas, 2, SweepStrategy::Exhaustive).is_err());
    }
}
