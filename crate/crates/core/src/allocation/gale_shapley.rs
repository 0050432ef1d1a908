//! Staged Gale-Shapley allocation of grid cells to centers.
//!
//! Every stage has two halves. In the application half each cell that is not
//! currently shortlisted applies to the nearest center that has not rejected
//! it. In the shortlisting half each center keeps its nearest applicants (old
//! and new) up to its cell quota and rejects the rest. The loop stops when a
//! stage produces no rejection.
//!
//! A center ranks cells by `(distance, cell index)` and a cell ranks centers
//! by `(distance, center index)`. A center whose shortlist is full and whose
//! worst shortlisted cell ranks above a given cell will reject that cell at
//! every later stage, because shortlists only improve. Such certain
//! rejections are applied during the application half instead of costing one
//! stage each; the final allocation is unchanged.

use crate::error::{Error, Result};
use crate::par;
use crate::spatial::SpatialIndex;

use super::config::PointConfiguration;
use super::grid::SiteGrid;
use super::{AllocationResult, Site};

/// Relative band (in units of `h`) inside which two distances count as equal.
pub const TIE_TOLERANCE: f64 = 1e-9;

type Key = (f64, u32);

#[inline]
fn key_gt(a: Key, b: Key) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 > b.1)
}

#[derive(Debug, Clone, Copy)]
enum Gate {
    Open,
    /// Full; accepts only cells ranking strictly above this key.
    Closed(Key),
}

impl Gate {
    #[inline]
    fn rejects(self, key: Key) -> bool {
        match self {
            Gate::Open => false,
            Gate::Closed(worst) => key_gt(key, worst),
        }
    }
}

#[derive(Debug, Clone)]
struct CenterState {
    quota: usize,
    /// Shortlist sorted by `(distance, cell)`.
    held: Vec<Key>,
}

impl CenterState {
    fn gate(&self) -> Gate {
        if self.held.len() < self.quota {
            Gate::Open
        } else if let Some(&worst) = self.held.last() {
            Gate::Closed(worst)
        } else {
            Gate::Closed((f64::NEG_INFINITY, 0))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CellState {
    /// Waiting to apply; carries the key (from the cell's side) of the last
    /// center that rejected it.
    Active(Option<Key>),
    Held(u32),
    Unclaimed,
    Tie,
}

#[derive(Debug, Clone, Copy)]
enum Choice {
    Apply(u32, f64),
    Unclaimed,
    Tie,
}

/// Number of cells a center may shortlist: `ceil(appetite / h^d)`.
pub fn cell_quota(appetite: f64, cell_volume: f64) -> usize {
    if appetite <= 0.0 {
        return 0;
    }
    (appetite / cell_volume - 1e-9).ceil().max(0.0) as usize
}

struct Snapshot<'a> {
    gates: &'a [Gate],
    all_closed: bool,
    /// Largest worst-shortlisted distance among closed centers. Beyond it
    /// only open centers can accept.
    max_closed_dist: f64,
    /// Index over the open centers and their global ids.
    open_index: Option<SpatialIndex>,
    open_ids: Vec<u32>,
}

impl Snapshot<'_> {
    /// Candidates within `radius`: every center up to the closed horizon,
    /// open centers beyond it.
    fn candidates(&self, all: &SpatialIndex, p: &[f64], radius: f64) -> Vec<Key> {
        let near = radius.min(self.max_closed_dist);
        let mut out = if near >= 0.0 { all.within(p, near) } else { Vec::new() };
        if radius > near {
            if let Some(open) = &self.open_index {
                open.for_each_within(p, radius, |i, d| {
                    if !(d <= near) {
                        out.push((d, self.open_ids[i]));
                    }
                });
            }
        }
        out
    }
}

struct Engine<'a> {
    grid: &'a SiteGrid,
    index: SpatialIndex,
    tol: f64,
    max_dist: f64,
    initial_radius: f64,
}

impl Engine<'_> {
    fn choose(&self, cell: u32, last: Option<Key>, snap: &Snapshot<'_>) -> Choice {
        let mut pos = [0.0f64; 8];
        let heap_pos: Vec<f64>;
        let p: &[f64] = if self.grid.dim() <= 8 {
            self.grid.cell_center_into(cell as usize, &mut pos[..self.grid.dim()]);
            &pos[..self.grid.dim()]
        } else {
            heap_pos = self.grid.cell_center(cell as usize);
            &heap_pos
        };

        let mut radius = last.map_or(0.0, |k| k.0) + self.initial_radius;
        loop {
            let complete = radius >= self.max_dist;
            let query = if complete {
                self.max_dist * (1.0 + 1e-12) + self.tol
            } else {
                radius
            };
            let mut cands = snap.candidates(&self.index, p, query);
            if let Some(l) = last {
                cands.retain(|&k| key_gt(k, l));
            }
            cands.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

            let mut first: Option<Key> = None;
            for &(d, c) in &cands {
                if let Some((d1, c1)) = first {
                    if d - d1 >= self.tol {
                        return Choice::Apply(c1, d1);
                    }
                    if !snap.gates[c as usize].rejects((d, cell)) {
                        return Choice::Tie;
                    }
                    continue;
                }
                if snap.all_closed && d > snap.max_closed_dist {
                    return Choice::Unclaimed;
                }
                if snap.gates[c as usize].rejects((d, cell)) {
                    continue;
                }
                first = Some((d, c));
            }
            match first {
                Some((d1, c1)) if complete || d1 + self.tol <= radius => return Choice::Apply(c1, d1),
                None if complete => return Choice::Unclaimed,
                // every center within the radius rejects, and all farther
                // ones are closed below it
                None if snap.all_closed && radius > snap.max_closed_dist => return Choice::Unclaimed,
                _ => radius *= 2.0,
            }
        }
    }
}

/// Runs the staged algorithm to completion.
pub fn gale_shapley(config: &PointConfiguration, grid: &SiteGrid) -> Result<AllocationResult> {
    let domain = grid.domain();
    config.check_domain(domain)?;
    let cells = grid.len();
    let cell_volume = grid.cell_volume();
    let n_centers = config.len();
    if cells > u32::MAX as usize || n_centers > u32::MAX as usize {
        return Err(Error::InvalidParameter("grid or configuration too large".into()));
    }

    let quotas: Vec<usize> = config.appetites().iter().map(|&a| cell_quota(a, cell_volume)).collect();

    if n_centers == 0 || quotas.iter().all(|&q| q == 0) {
        return Ok(AllocationResult::new(
            vec![Site::Unclaimed; cells],
            vec![0; n_centers],
            quotas,
            config.appetites().to_vec(),
            cell_volume,
            0,
        ));
    }

    let index = SpatialIndex::new(domain, config.centers(), 1.0);
    let engine = Engine {
        grid,
        tol: TIE_TOLERANCE * grid.h(),
        max_dist: domain.max_distance(),
        initial_radius: index.min_bucket_width().max(grid.h()),
        index,
    };

    let mut centers: Vec<CenterState> = quotas
        .iter()
        .map(|&quota| CenterState {
            quota,
            held: Vec::new(),
        })
        .collect();
    let mut states = vec![CellState::Active(None); cells];
    let mut active: Vec<(u32, Option<Key>)> = (0..cells as u32).map(|c| (c, None)).collect();

    let stage_cap = 10usize.saturating_mul(cells).max(16);
    let mut stage = 0usize;
    while !active.is_empty() {
        stage += 1;
        if stage > stage_cap {
            return Err(Error::Internal(format!("allocation exceeded {stage_cap} stages")));
        }

        // (a) applications against a snapshot of the shortlists
        let gates: Vec<Gate> = centers.iter().map(CenterState::gate).collect();
        let mut all_closed = true;
        let mut max_closed_dist = f64::NEG_INFINITY;
        for g in &gates {
            match g {
                Gate::Open => all_closed = false,
                Gate::Closed((d, _)) => max_closed_dist = max_closed_dist.max(*d),
            }
        }
        let open_ids: Vec<u32> = (0..n_centers as u32)
            .filter(|&c| matches!(gates[c as usize], Gate::Open))
            .collect();
        let open_index = if open_ids.is_empty() {
            None
        } else {
            let pts: Vec<_> = open_ids.iter().map(|&c| config.centers()[c as usize].clone()).collect();
            Some(SpatialIndex::new(domain, &pts, 1.0))
        };
        let snap = Snapshot {
            gates: &gates,
            all_closed,
            max_closed_dist,
            open_index,
            open_ids,
        };
        let choices = par::map_slice(&active, |&(cell, last)| engine.choose(cell, last, &snap));

        let mut applications: Vec<(u32, f64, u32)> = Vec::with_capacity(active.len());
        for (&(cell, _), choice) in active.iter().zip(&choices) {
            match *choice {
                Choice::Apply(c, d) => applications.push((c, d, cell)),
                Choice::Unclaimed => states[cell as usize] = CellState::Unclaimed,
                Choice::Tie => states[cell as usize] = CellState::Tie,
            }
        }
        if applications.is_empty() {
            break;
        }

        // (b) shortlisting
        par::sort_by(&mut applications, |a, b| {
            a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2))
        });
        let mut offsets = vec![0usize; n_centers + 1];
        for &(c, _, _) in &applications {
            offsets[c as usize + 1] += 1;
        }
        for i in 0..n_centers {
            offsets[i + 1] += offsets[i];
        }
        let apps = &applications;
        let offs = &offsets;
        let outcomes = par::map_mut(&mut centers, |c, state| {
            let group = &apps[offs[c]..offs[c + 1]];
            if group.is_empty() {
                return (Vec::new(), Vec::new());
            }
            shortlist(state, group)
        });

        let mut next = Vec::new();
        for (c, (accepted, rejected)) in outcomes.into_iter().enumerate() {
            for cell in accepted {
                states[cell as usize] = CellState::Held(c as u32);
            }
            for (cell, d) in rejected {
                let last = Some((d, c as u32));
                states[cell as usize] = CellState::Active(last);
                next.push((cell, last));
            }
        }
        active = next;
    }

    let mut territory = vec![0usize; n_centers];
    let assignment: Vec<Site> = states
        .iter()
        .map(|s| match *s {
            CellState::Held(c) => {
                territory[c as usize] += 1;
                Site::Center(c)
            }
            CellState::Unclaimed => Site::Unclaimed,
            CellState::Tie => Site::Tie,
            CellState::Active(_) => Site::Unclaimed,
        })
        .collect();
    if states.iter().any(|s| matches!(s, CellState::Active(_))) {
        return Err(Error::Internal("allocation finished with cells still active".into()));
    }
    Ok(AllocationResult::new(
        assignment,
        territory,
        quotas,
        config.appetites().to_vec(),
        cell_volume,
        stage,
    ))
}

/// Merges the shortlist with a sorted group of applications and truncates to
/// the quota. Returns the newly accepted cells and the rejected cells with
/// their distance.
fn shortlist(state: &mut CenterState, group: &[(u32, f64, u32)]) -> (Vec<u32>, Vec<(u32, f64)>) {
    let quota = state.quota;
    let old = std::mem::take(&mut state.held);
    let mut merged: Vec<(Key, bool)> = Vec::with_capacity(old.len() + group.len());
    let (mut i, mut j) = (0, 0);
    while i < old.len() || j < group.len() {
        let take_old = if i == old.len() {
            false
        } else if j == group.len() {
            true
        } else {
            let g = (group[j].1, group[j].2);
            !key_gt(old[i], g)
        };
        if take_old {
            merged.push((old[i], false));
            i += 1;
        } else {
            merged.push(((group[j].1, group[j].2), true));
            j += 1;
        }
    }
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    for (rank, ((d, cell), fresh)) in merged.into_iter().enumerate() {
        if rank < quota {
            state.held.push((d, cell));
            if fresh {
                accepted.push(cell);
            }
        } else {
            rejected.push((cell, d));
        }
    }
    (accepted, rejected)
}
