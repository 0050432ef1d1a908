//! Runtime invariant suite.
//!
//! Each check runs over a number of seeded replicas and counts failures.
//! Output depends only on the settings, never on thread count or timing.

use serde::Serialize;

use crate::allocation::{
    gale_shapley, monotonicity_violations, phase_diagnostics, verify_stability, PointConfiguration, SiteGrid,
};
use crate::appetite::{moment_report, AppetiteDistribution};
use crate::boolean::{build_boolean, check_domination, compute_radius_truncated, radius_certificate};
use crate::bounds::{classify_phase, eq2_threshold, poisson_chernoff, poisson_upper_tail, Phase, PhaseParams};
use crate::error::Result;
use crate::geometry::Domain;
use crate::par;
use crate::percolation::{ball_components, claimed_components};
use crate::replica::Replica;

#[derive(Debug, Clone)]
pub struct ValidationSettings {
    pub domain: Domain,
    pub lambda: f64,
    pub h: f64,
    pub appetite: AppetiteDistribution,
    pub replicas: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub note: String,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    trials: usize,
    failures: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
        }
    }

    fn add(&mut self, other: Tally) {
        self.trials += other.trials;
        self.failures += other.failures;
    }
}

const CHECKS: [&str; 10] = [
    "stability",
    "determinism",
    "territory_bound",
    "monotone_alpha",
    "monotone_thinning",
    "monotone_truncation",
    "radius_certificate",
    "truncation_consistency",
    "domination",
    "domination_crossing",
];

/// Runs every check and returns one outcome per check, in a fixed order.
pub fn run_suite(settings: &ValidationSettings) -> Result<Vec<CheckOutcome>> {
    settings.appetite.validate()?;
    let grid = SiteGrid::new(settings.domain.clone(), settings.h)?;
    let dist = &settings.appetite;
    let d = settings.domain.dim();

    // the Boolean checks need a truncation level; fall back to 1
    let delta1 = if dist.delta1 > 0.0 { dist.delta1 } else { 1.0 };
    let truncated = dist.with_delta1(delta1);
    let moments = moment_report(&truncated);
    let dom_alpha = if moments.mean.is_finite() {
        Some(0.5 * eq2_threshold(settings.lambda, d, moments.mean)?)
    } else {
        None
    };

    let per_replica: Vec<Result<Vec<Tally>>> = par::map_range(settings.replicas, |r| {
        let replica = Replica::sample(&settings.domain, settings.lambda, false, settings.seed, r as u64)?;
        replica_checks(&replica, dist, &truncated, dom_alpha, &grid)
    });
    let mut totals = vec![Tally::default(); CHECKS.len()];
    for tallies in per_replica {
        for (t, x) in totals.iter_mut().zip(tallies?) {
            t.add(x);
        }
    }

    let mut out: Vec<CheckOutcome> = CHECKS
        .iter()
        .zip(totals)
        .map(|(name, t)| CheckOutcome {
            name,
            trials: t.trials,
            failures: t.failures,
            note: String::new(),
        })
        .collect();
    if dist.delta1 <= 0.0 {
        for o in out.iter_mut().skip(6) {
            o.note = format!("run with delta1 = {delta1}");
        }
    }
    if let Some(a) = dom_alpha {
        out[8].note = format!("alpha = {a}");
        out[9].note = format!("alpha = {a}");
    }
    out.push(chernoff_check());
    out.push(phase_check(settings, &grid)?);
    Ok(out)
}

fn replica_checks(
    replica: &Replica,
    dist: &AppetiteDistribution,
    truncated: &AppetiteDistribution,
    dom_alpha: Option<f64>,
    grid: &SiteGrid,
) -> Result<Vec<Tally>> {
    let mut t = vec![Tally::default(); CHECKS.len()];
    let domain = grid.domain();
    let config = replica.configuration(dist)?;
    let alloc = gale_shapley(&config, grid)?;

    t[0].record(verify_stability(&alloc, &config, grid)?.is_empty());
    t[1].record(gale_shapley(&config, grid)? == alloc);
    let slack = grid.cell_volume() * (1.0 + 1e-9);
    t[2].record((0..config.len()).all(|c| alloc.territory_volume(c) <= config.appetites()[c] + slack));

    let bigger = replica.configuration(&dist.with_alpha(1.5 * dist.alpha))?;
    let bigger_alloc = gale_shapley(&bigger, grid)?;
    let m = monotonicity_violations((&alloc, &config), (&bigger_alloc, &bigger), grid)?;
    t[3].record(m.distance == 0 && m.containment == 0);

    let thin = replica.thinned(dist, 0.5)?;
    let thin_alloc = gale_shapley(&thin, grid)?;
    let m = monotonicity_violations((&thin_alloc, &thin), (&alloc, &config), grid)?;
    t[4].record(m.distance == 0 && m.containment == 0);

    let untruncated = replica.configuration(&dist.with_delta1(0.0))?;
    let trunc_config = replica.configuration(truncated)?;
    let (ua, ta) = (gale_shapley(&untruncated, grid)?, gale_shapley(&trunc_config, grid)?);
    let m = monotonicity_violations((&ua, &untruncated), (&ta, &trunc_config), grid)?;
    t[5].record(m.distance == 0 && m.containment == 0);

    let model = build_boolean(&trunc_config, domain)?;
    let b = model.min_radius();
    let mut certified = true;
    for (i, &r) in model.radii().iter().enumerate() {
        certified &= r >= b * (1.0 - 1e-12) && radius_certificate(i, r, &trunc_config, domain)?;
    }
    t[6].record(certified);

    let finite: Vec<f64> = model.radii().iter().cloned().filter(|r| r.is_finite()).collect();
    if !finite.is_empty() {
        let mut sorted = finite;
        sorted.sort_by(f64::total_cmp);
        let cap = sorted[sorted.len() / 2].max(b) * 1.0001;
        let mut consistent = true;
        for (i, &r) in model.radii().iter().enumerate() {
            let rt = compute_radius_truncated(i, &trunc_config, domain, cap)?;
            if r < cap || rt < cap {
                consistent &= rt == r;
            }
        }
        t[7].record(consistent);
    }

    if let Some(alpha) = dom_alpha {
        let small = replica.configuration(&truncated.with_alpha(alpha))?;
        let small_alloc = gale_shapley(&small, grid)?;
        let small_model = build_boolean(&small, domain)?;
        t[8].record(check_domination(&small_alloc, &small_model, &small, grid)?.is_empty());
        // a claimed crossing forces a Boolean crossing
        if !domain.is_periodic() && small_model.infinite().is_empty() {
            let balls = ball_components(&small_model, domain)?;
            let cells = claimed_components(&small_alloc, grid)?;
            t[9].record(balls.percolates || !cells.percolates);
        }
    }
    Ok(t)
}

/// The Poisson Chernoff bound against the exact tail on a fixed grid.
fn chernoff_check() -> CheckOutcome {
    let mut t = Tally::default();
    for &lambda in &[1.0, 5.0, 10.0, 50.0] {
        for &ratio in &[1.1, 1.5, 2.0, 5.0] {
            let a = lambda * ratio;
            let bound = poisson_chernoff(lambda, a).unwrap_or(f64::NAN);
            t.record(bound >= poisson_upper_tail(lambda, a));
        }
    }
    CheckOutcome {
        name: "poisson_chernoff",
        trials: t.trials,
        failures: t.failures,
        note: String::new(),
    }
}

/// The phase predicted from `lambda alpha EV` against the replica averages.
fn phase_check(settings: &ValidationSettings, grid: &SiteGrid) -> Result<CheckOutcome> {
    let dist = &settings.appetite;
    let ev = moment_report(dist).mean;
    let mut outcome = CheckOutcome {
        name: "phase_direction",
        trials: 0,
        failures: 0,
        note: String::new(),
    };
    if !settings.domain.is_periodic() || !(ev > 0.0 && ev.is_finite()) {
        outcome.note = "needs a periodic window and finite EV'".into();
        return Ok(outcome);
    }
    let phase = classify_phase(PhaseParams::new(settings.lambda, dist.alpha, ev)?);
    outcome.note = phase.as_str().to_string();
    if phase == Phase::Critical || settings.replicas == 0 {
        return Ok(outcome);
    }
    let diags: Vec<Result<(f64, f64)>> = par::map_range(settings.replicas, |r| {
        let replica = Replica::sample(&settings.domain, settings.lambda, false, settings.seed, r as u64)?;
        let config: PointConfiguration = replica.configuration(dist)?;
        let alloc = gale_shapley(&config, grid)?;
        let diag = phase_diagnostics(&alloc, &config, grid)?;
        Ok((diag.claimed_volume_fraction, diag.fraction_sated))
    });
    let diags: Vec<(f64, f64)> = diags.into_iter().collect::<Result<_>>()?;
    let n = diags.len() as f64;
    let claimed = diags.iter().map(|d| d.0).sum::<f64>() / n;
    let sated = diags.iter().map(|d| d.1).sum::<f64>() / n;
    let ok = match phase {
        Phase::Subcritical => sated >= 0.9 && claimed < 1.0,
        _ => claimed >= 0.9 && sated < 1.0,
    };
    outcome.trials = 1;
    outcome.failures = usize::from(!ok);
    outcome.note = format!("{}: claimed {claimed:.4}, sated {sated:.4}", phase.as_str());
    Ok(outcome)
}
