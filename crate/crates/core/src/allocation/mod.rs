//! Discretized stable allocation of sites to centers.
//!
//! Lebesgue measure is replaced by cell counting on a [`SiteGrid`]: a center
//! with appetite `a` may hold `ceil(a / h^d)` cells.

mod config;
mod gale_shapley;
mod grid;

pub use config::PointConfiguration;
pub use gale_shapley::{cell_quota, gale_shapley, TIE_TOLERANCE};
pub use grid::SiteGrid;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;

/// What a cell is allocated to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    Center(u32),
    /// Rejected by every center.
    Unclaimed,
    /// Equidistant from its two nearest candidate centers.
    Tie,
}

impl Site {
    pub fn center(self) -> Option<usize> {
        match self {
            Site::Center(c) => Some(c as usize),
            _ => None,
        }
    }
}

/// Output of [`gale_shapley`]. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult {
    assignment: Vec<Site>,
    territory_cells: Vec<usize>,
    quotas: Vec<usize>,
    appetites: Vec<f64>,
    cell_volume: f64,
    stages: usize,
}

impl AllocationResult {
    pub(crate) fn new(
        assignment: Vec<Site>,
        territory_cells: Vec<usize>,
        quotas: Vec<usize>,
        appetites: Vec<f64>,
        cell_volume: f64,
        stages: usize,
    ) -> Self {
        Self {
            assignment,
            territory_cells,
            quotas,
            appetites,
            cell_volume,
            stages,
        }
    }

    /// Rebuilds a result from a raw per-cell assignment, recomputing the
    /// territory sizes. Used to examine hand-made allocations.
    pub fn from_assignment(assignment: Vec<Site>, config: &PointConfiguration, grid: &SiteGrid) -> Result<Self> {
        if assignment.len() != grid.len() {
            return Err(Error::Mismatch(format!(
                "assignment has {} cells, grid has {}",
                assignment.len(),
                grid.len()
            )));
        }
        let mut territory = vec![0usize; config.len()];
        for s in &assignment {
            if let Site::Center(c) = s {
                let slot = territory
                    .get_mut(*c as usize)
                    .ok_or_else(|| Error::Mismatch(format!("cell assigned to unknown center {c}")))?;
                *slot += 1;
            }
        }
        let cv = grid.cell_volume();
        Ok(Self::new(
            assignment,
            territory,
            config.appetites().iter().map(|&a| cell_quota(a, cv)).collect(),
            config.appetites().to_vec(),
            cv,
            0,
        ))
    }

    pub fn assignment(&self) -> &[Site] {
        &self.assignment
    }

    pub fn site(&self, cell: usize) -> Site {
        self.assignment[cell]
    }

    pub fn num_centers(&self) -> usize {
        self.territory_cells.len()
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    pub fn territory_cells(&self, center: usize) -> usize {
        self.territory_cells[center]
    }

    pub fn territory_volume(&self, center: usize) -> f64 {
        self.territory_cells[center] as f64 * self.cell_volume
    }

    pub fn quota(&self, center: usize) -> usize {
        self.quotas[center]
    }

    /// Whether the center holds its full cell quota.
    pub fn is_full(&self, center: usize) -> bool {
        self.territory_cells[center] >= self.quotas[center]
    }

    /// Sated up to one cell of quantization: `|territory - appetite| <= h^d`.
    pub fn is_sated(&self, center: usize) -> bool {
        (self.territory_volume(center) - self.appetites[center]).abs() <= self.cell_volume * (1.0 + 1e-9)
    }

    pub fn sated_flags(&self) -> Vec<bool> {
        (0..self.num_centers()).map(|c| self.is_sated(c)).collect()
    }

    /// Mask of cells allocated to some center.
    pub fn claimed_mask(&self) -> Vec<bool> {
        self.assignment.iter().map(|s| matches!(s, Site::Center(_))).collect()
    }

    pub fn count(&self, pred: impl Fn(Site) -> bool) -> usize {
        self.assignment.iter().filter(|s| pred(**s)).count()
    }

    pub fn claimed_cells(&self) -> usize {
        self.count(|s| matches!(s, Site::Center(_)))
    }

    pub fn unclaimed_cells(&self) -> usize {
        self.count(|s| s == Site::Unclaimed)
    }

    pub fn tie_cells(&self) -> usize {
        self.count(|s| s == Site::Tie)
    }
}

/// A cell that desires a center which covets it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UnstablePair {
    pub cell: usize,
    pub center: usize,
}

/// Exhaustive stability check over all (cell, center) pairs.
///
/// A cell desires a center if it is unclaimed or the center is strictly
/// closer than its own. A center covets a cell if it has not filled its cell
/// quota or holds some cell strictly farther away. Tie cells are skipped.
pub fn verify_stability(
    result: &AllocationResult,
    config: &PointConfiguration,
    grid: &SiteGrid,
) -> Result<Vec<UnstablePair>> {
    check_shapes(result, config, grid)?;
    let domain = grid.domain();
    let n = config.len();

    let mut farthest = vec![f64::NEG_INFINITY; n];
    let mut pos = vec![0.0; grid.dim()];
    for (cell, s) in result.assignment.iter().enumerate() {
        if let Site::Center(c) = *s {
            grid.cell_center_into(cell, &mut pos);
            let d = domain.dist(&pos, config.centers()[c as usize].coords());
            farthest[c as usize] = farthest[c as usize].max(d);
        }
    }
    let full: Vec<bool> = (0..n).map(|c| result.is_full(c)).collect();

    let per_cell = par::map_range(grid.len(), |cell| {
        let mut out = Vec::new();
        let own = result.assignment[cell];
        if own == Site::Tie {
            return out;
        }
        let p = grid.cell_center(cell);
        let own_dist = match own {
            Site::Center(c) => domain.dist(&p, config.centers()[c as usize].coords()),
            _ => f64::INFINITY,
        };
        for (c, center) in config.centers().iter().enumerate() {
            if own == Site::Center(c as u32) {
                continue;
            }
            let d = domain.dist(&p, center.coords());
            let desires = d < own_dist;
            let covets = !full[c] || d < farthest[c];
            if desires && covets {
                out.push(UnstablePair { cell, center: c });
            }
        }
        out
    });
    Ok(per_cell.into_iter().flatten().collect())
}

/// Aggregate phase statistics of one allocation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseDiagnostics {
    /// Claimed volume over window volume. Tie cells count as neither.
    pub claimed_volume_fraction: f64,
    /// Sated centers over all centers (1 when there are none).
    pub fraction_sated: f64,
    pub unclaimed_volume: f64,
    pub tie_volume: f64,
}

pub fn phase_diagnostics(
    result: &AllocationResult,
    config: &PointConfiguration,
    grid: &SiteGrid,
) -> Result<PhaseDiagnostics> {
    check_shapes(result, config, grid)?;
    let cv = grid.cell_volume();
    let volume = grid.domain().volume();
    let sated = (0..config.len()).filter(|&c| result.is_sated(c)).count();
    Ok(PhaseDiagnostics {
        claimed_volume_fraction: result.claimed_cells() as f64 * cv / volume,
        fraction_sated: if config.is_empty() {
            1.0
        } else {
            sated as f64 / config.len() as f64
        },
        unclaimed_volume: result.unclaimed_cells() as f64 * cv,
        tie_volume: result.tie_cells() as f64 * cv,
    })
}

/// Violations of the coupled monotonicity between an allocation with fewer
/// centers or smaller appetites (`small`) and one with more (`large`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MonotonicityReport {
    /// Cells strictly closer to their center under `small` than under
    /// `large` (unclaimed counts as infinitely far).
    pub distance: usize,
    /// Cells claimed under `small` but unclaimed under `large`.
    pub containment: usize,
}

/// Compares two allocations on the same grid cell by cell. Tie cells in
/// either allocation are skipped.
pub fn monotonicity_violations(
    small: (&AllocationResult, &PointConfiguration),
    large: (&AllocationResult, &PointConfiguration),
    grid: &SiteGrid,
) -> Result<MonotonicityReport> {
    check_shapes(small.0, small.1, grid)?;
    check_shapes(large.0, large.1, grid)?;
    let domain = grid.domain();
    let tol = TIE_TOLERANCE * grid.h();
    let mut report = MonotonicityReport::default();
    let mut pos = vec![0.0; grid.dim()];
    let dist_to = |site: Site, config: &PointConfiguration, pos: &[f64]| match site {
        Site::Center(c) => domain.dist(pos, config.centers()[c as usize].coords()),
        _ => f64::INFINITY,
    };
    for cell in 0..grid.len() {
        let (s, l) = (small.0.site(cell), large.0.site(cell));
        if s == Site::Tie || l == Site::Tie {
            continue;
        }
        grid.cell_center_into(cell, &mut pos);
        let ds = dist_to(s, small.1, &pos);
        let dl = dist_to(l, large.1, &pos);
        if dl > ds + tol {
            report.distance += 1;
        }
        if matches!(s, Site::Center(_)) && l == Site::Unclaimed {
            report.containment += 1;
        }
    }
    Ok(report)
}

fn check_shapes(result: &AllocationResult, config: &PointConfiguration, grid: &SiteGrid) -> Result<()> {
    if result.assignment.len() != grid.len() {
        return Err(Error::Mismatch(format!(
            "allocation has {} cells, grid has {}",
            result.assignment.len(),
            grid.len()
        )));
    }
    if result.num_centers() != config.len() {
        return Err(Error::Mismatch(format!(
            "allocation has {} centers, configuration has {}",
            result.num_centers(),
            config.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
