//! The six subcommands. Each writes its tables into a fresh run directory and
//! returns the directory; an invariant breach is reported after the artifacts
//! and manifest are on disk, so the evidence survives the nonzero exit.

use std::path::PathBuf;

use marriage_core::boolean::{build_boolean, tail_statistics, BooleanModel};
use marriage_core::bounds::{
    centered_moments, classify_phase, eq2_threshold, nagaev_bound, poisson_chernoff, poisson_upper_tail, PhaseParams,
};
use marriage_core::par;
use marriage_core::percolation::{
    ball_components, claimed_components, critical_sweep, unclaimed_components, ClusterReport, SweepStrategy,
    SweepTemplate,
};
use marriage_core::replica::Replica;
use marriage_core::validate::{run_suite, ValidationSettings};
use marriage_core::{
    gale_shapley, moment_report, phase_diagnostics, unit_ball_volume, verify_stability, AllocationResult, Site,
};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::run::{num, opt, pgm, RunDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Allocate,
    Boolean,
    Percolate,
    Sweep,
    Bounds,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Allocate => "allocate",
            Command::Boolean => "boolean",
            Command::Percolate => "percolate",
            Command::Sweep => "sweep",
            Command::Bounds => "bounds",
            Command::Validate => "validate",
        }
    }
}

pub fn run(command: Command, config: &ExperimentConfig) -> Result<PathBuf> {
    config.check()?;
    if matches!(command, Command::Boolean) {
        config.require_truncation()?;
    }
    let mut dir = RunDir::create(config, command.name())?;
    log::info!("{} into {}", command.name(), dir.path().display());
    let breach = match command {
        Command::Allocate => allocate(config, &mut dir)?,
        Command::Boolean => boolean(config, &mut dir)?,
        Command::Percolate => percolate(config, &mut dir)?,
        Command::Sweep => sweep(config, &mut dir)?,
        Command::Bounds => bounds(config, &mut dir)?,
        Command::Validate => validate(config, &mut dir)?,
    };
    let path = dir.finish(config)?;
    match breach {
        Some(msg) => Err(CliError::Invariant(msg)),
        None => Ok(path),
    }
}

fn replicas(config: &ExperimentConfig) -> Result<Vec<Replica>> {
    let domain = config.domain()?;
    par::map_range(config.replicas, |r| {
        Replica::sample(&domain, config.intensity, config.palm, config.seed, r as u64)
    })
    .into_iter()
    .map(|r| r.map_err(CliError::from))
    .collect()
}

fn coord_headers(d: usize) -> Vec<String> {
    (0..d).map(|k| format!("x{k}")).collect()
}

fn allocate(config: &ExperimentConfig, dir: &mut RunDir) -> Result<Option<String>> {
    let grid = config.grid()?;
    let dist = config.appetite()?;
    let reps = replicas(config)?;
    let results = par::map_slice(&reps, |rep| -> Result<_> {
        let pc = rep.configuration(&dist)?;
        let alloc = gale_shapley(&pc, &grid)?;
        let diag = phase_diagnostics(&alloc, &pc, &grid)?;
        let unstable = verify_stability(&alloc, &pc, &grid)?.len();
        Ok((pc, alloc, diag, unstable))
    });
    let results: Vec<_> = results.into_iter().collect::<Result<_>>()?;

    let rows: Vec<Vec<String>> = results
        .iter()
        .zip(&reps)
        .map(|((pc, alloc, diag, unstable), rep)| {
            vec![
                rep.index.to_string(),
                pc.len().to_string(),
                num(diag.claimed_volume_fraction),
                num(diag.fraction_sated),
                num(diag.unclaimed_volume),
                num(diag.tie_volume),
                alloc.stages().to_string(),
                unstable.to_string(),
            ]
        })
        .collect();
    dir.csv(
        "allocation.csv",
        &[
            "replica",
            "centers",
            "claimed_fraction",
            "fraction_sated",
            "unclaimed_volume",
            "tie_volume",
            "stages",
            "unstable_pairs",
        ],
        &rows,
    )?;

    if let Some((pc, alloc, _, _)) = results.first() {
        let d = grid.dim();
        let mut header: Vec<String> = vec!["center".into()];
        header.extend(coord_headers(d));
        header.extend(["appetite", "quota", "cells", "volume", "sated"].map(String::from));
        let rows: Vec<Vec<String>> = (0..pc.len())
            .map(|c| {
                let mut row = vec![c.to_string()];
                row.extend(pc.centers()[c].coords().iter().map(|&x| num(x)));
                row.extend([
                    num(pc.appetites()[c]),
                    alloc.quota(c).to_string(),
                    alloc.territory_cells(c).to_string(),
                    num(alloc.territory_volume(c)),
                    alloc.is_sated(c).to_string(),
                ]);
                row
            })
            .collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        dir.csv("territories.csv", &header, &rows)?;
        if config.raster && d <= 2 {
            let (w, h) = (grid.counts()[0], grid.counts().get(1).copied().unwrap_or(1));
            dir.write("territory.pgm", &pgm(w, h, &raster(alloc)))?;
        }
    }

    let moments = moment_report(&dist);
    let n = results.len().max(1) as f64;
    let mean_claimed = results.iter().map(|r| r.2.claimed_volume_fraction).sum::<f64>() / n;
    let mean_sated = results.iter().map(|r| r.2.fraction_sated).sum::<f64>() / n;
    let phase = phase_row(config, moments.mean)?;
    dir.csv(
        "summary.csv",
        &[
            "lambda",
            "alpha",
            "ev",
            "load",
            "phase",
            "replicas",
            "mean_claimed_fraction",
            "mean_fraction_sated",
        ],
        &[vec![
            num(config.intensity),
            num(config.alpha),
            num(moments.mean),
            phase.0,
            phase.1,
            results.len().to_string(),
            num(mean_claimed),
            num(mean_sated),
        ]],
    )?;

    let unstable: usize = results.iter().map(|r| r.3).sum();
    Ok((unstable > 0).then(|| format!("{unstable} unstable pairs across {} replicas", results.len())))
}

/// Load and phase label, or empty fields when the mean appetite is not a
/// valid phase parameter.
fn phase_row(config: &ExperimentConfig, ev: f64) -> Result<(String, String)> {
    match PhaseParams::new(config.intensity, config.alpha, ev) {
        Ok(p) => Ok((num(p.load()), classify_phase(p).as_str().to_string())),
        Err(e) => {
            log::warn!("no phase classification: {e}");
            Ok((String::new(), String::new()))
        }
    }
}

/// Grey level per cell: black unclaimed, white ties, a spread of greys for
/// territories.
fn raster(alloc: &AllocationResult) -> Vec<u8> {
    alloc
        .assignment()
        .iter()
        .map(|s| match *s {
            Site::Unclaimed => 0,
            Site::Tie => 255,
            Site::Center(c) => 40 + ((c as u64 * 61) % 191) as u8,
        })
        .collect()
}

fn boolean(config: &ExperimentConfig, dir: &mut RunDir) -> Result<Option<String>> {
    let domain = config.domain()?;
    let dist = config.appetite()?;
    let d = domain.dim();
    let reps = replicas(config)?;
    let built: Vec<Result<_>> = reps
        .iter()
        .map(|rep| -> Result<_> {
            let pc = rep.configuration(&dist)?;
            let model = build_boolean(&pc, &domain)?;
            Ok((pc, model))
        })
        .collect();
    let built: Vec<_> = built.into_iter().collect::<Result<_>>()?;

    let mut header: Vec<String> = vec!["replica".into(), "center".into()];
    header.extend(coord_headers(d));
    header.extend(["appetite", "radius", "truncated"].map(String::from));
    let mut rows = Vec::new();
    for (rep, (pc, model)) in reps.iter().zip(&built) {
        for c in 0..model.len() {
            let mut row = vec![rep.index.to_string(), c.to_string()];
            row.extend(pc.centers()[c].coords().iter().map(|&x| num(x)));
            row.extend([
                num(pc.appetites()[c]),
                num(model.radii()[c]),
                model.truncated()[c].to_string(),
            ]);
            rows.push(row);
        }
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    dir.csv("radii.csv", &header, &rows)?;

    let models: Vec<BooleanModel> = built.into_iter().map(|(_, m)| m).collect();
    let infinite: usize = models.iter().map(|m| m.infinite().len()).sum();
    let truncated: usize = models
        .iter()
        .map(|m| m.truncated().iter().filter(|&&t| t).count())
        .sum();
    let b = (config.alpha * config.delta1 / unit_ball_volume(d)?).powf(1.0 / d as f64);
    let moments = moment_report(&dist);
    let eq2 = eq2_threshold(config.intensity, d, moments.mean).ok();

    let (samples, sup, argsup, slope) = match tail_statistics(&models) {
        Ok(tail) => {
            let rows: Vec<Vec<String>> = (0..tail.grid.len())
                .map(|k| vec![num(tail.grid[k]), num(tail.survival[k]), num(tail.weighted[k])])
                .collect();
            dir.csv("tail.csv", &["r", "survival", "weighted"], &rows)?;
            (
                tail.samples.to_string(),
                num(tail.sup_statistic),
                num(tail.argsup),
                opt(tail.tail_slope),
            )
        }
        Err(e) => {
            log::warn!("no tail statistics: {e}");
            dir.csv("tail.csv", &["r", "survival", "weighted"], &[])?;
            ("0".into(), String::new(), String::new(), String::new())
        }
    };
    dir.csv(
        "tail_summary.csv",
        &[
            "samples",
            "sup_statistic",
            "argsup",
            "tail_slope",
            "b",
            "alpha",
            "eq2_threshold",
            "infinite",
            "truncated",
        ],
        &[vec![
            samples,
            sup,
            argsup,
            slope,
            num(b),
            num(config.alpha),
            opt(eq2),
            infinite.to_string(),
            truncated.to_string(),
        ]],
    )?;
    Ok(None)
}

fn cluster_row(replica: u64, set: &str, d: usize, report: &ClusterReport) -> Vec<String> {
    let mut row = vec![
        replica.to_string(),
        set.to_string(),
        report.num_components().to_string(),
        report.largest().to_string(),
    ];
    row.extend((0..d).map(|k| report.crossing.get(k).copied().unwrap_or(false).to_string()));
    row.push(report.percolates.to_string());
    row.push(report.origin.as_ref().map(|o| num(o.m)).unwrap_or_default());
    row.push(report.origin.as_ref().map(|o| num(o.d)).unwrap_or_default());
    row
}

fn percolate(config: &ExperimentConfig, dir: &mut RunDir) -> Result<Option<String>> {
    let grid = config.grid()?;
    let domain = grid.domain().clone();
    let d = domain.dim();
    let dist = config.appetite()?;
    let reps = replicas(config)?;
    let per_rep = par::map_slice(&reps, |rep| -> Result<Vec<Vec<String>>> {
        let pc = rep.configuration(&dist)?;
        let alloc = gale_shapley(&pc, &grid)?;
        let mut rows = vec![
            cluster_row(rep.index, "claimed", d, &claimed_components(&alloc, &grid)?),
            cluster_row(rep.index, "unclaimed", d, &unclaimed_components(&alloc, &grid)?),
        ];
        if config.delta1 > 0.0 {
            let model = build_boolean(&pc, &domain)?;
            if model.infinite().is_empty() {
                rows.push(cluster_row(rep.index, "boolean", d, &ball_components(&model, &domain)?));
            } else {
                log::warn!("replica {}: infinite radius, boolean clusters skipped", rep.index);
            }
        }
        Ok(rows)
    });
    let mut rows = Vec::new();
    for r in per_rep {
        rows.extend(r?);
    }
    let mut header: Vec<String> = ["replica", "set", "components", "largest"].map(String::from).to_vec();
    header.extend((0..d).map(|k| format!("crossing_{k}")));
    header.extend(["percolates", "origin_m", "origin_d"].map(String::from));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    dir.csv("clusters.csv", &header, &rows)?;
    Ok(None)
}

fn sweep(config: &ExperimentConfig, dir: &mut RunDir) -> Result<Option<String>> {
    let template = SweepTemplate {
        domain: config.domain()?,
        lambda: config.intensity,
        h: config.h,
        appetite: config.appetite()?,
        palm: config.palm,
        seed: config.seed,
    };
    let alphas = config.alphas()?;
    let strategy = config.strategy()?;
    let table = critical_sweep(&template, &alphas, config.replicas, strategy)?;

    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                num(r.alpha),
                r.replicas.to_string(),
                r.evaluated.to_string(),
                r.crossings.to_string(),
                num(r.p_hat),
                num(r.ci_lo),
                num(r.ci_hi),
                opt(r.mean_claimed_fraction),
                r.complement_crossings.map(|c| c.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    dir.csv(
        "sweep.csv",
        &[
            "alpha",
            "replicas",
            "evaluated",
            "crossings",
            "p_hat",
            "ci_lo",
            "ci_hi",
            "mean_claimed_fraction",
            "complement_crossings",
        ],
        &rows,
    )?;

    let mut rows = Vec::new();
    for (r, ind) in table.indicators.iter().enumerate() {
        for (alpha, &crosses) in alphas.iter().zip(ind) {
            rows.push(vec![r.to_string(), num(*alpha), u8::from(crosses).to_string()]);
        }
    }
    dir.csv("indicators.csv", &["replica", "alpha", "crosses"], &rows)?;

    let strategy_name = match strategy {
        SweepStrategy::Exhaustive => "exhaustive",
        SweepStrategy::Bisection => "bisection",
    };
    dir.csv(
        "sweep_summary.csv",
        &["strategy", "bracket_lo", "bracket_hi", "monotonicity_violations"],
        &[vec![
            strategy_name.into(),
            opt(table.bracket.map(|b| b.0)),
            opt(table.bracket.map(|b| b.1)),
            table.monotonicity_violations.to_string(),
        ]],
    )?;
    let v = table.monotonicity_violations;
    Ok((v > 0).then(|| format!("crossing indicator decreased in alpha for {v} replicas")))
}

const CHERNOFF_LAMBDAS: [f64; 4] = [1.0, 5.0, 10.0, 50.0];
const CHERNOFF_RATIOS: [f64; 4] = [1.1, 1.5, 2.0, 5.0];
const NAGAEV_N: [u64; 3] = [10, 100, 1000];
const NAGAEV_SIGMAS: [f64; 5] = [1.0, 2.0, 3.0, 5.0, 10.0];

fn bounds(config: &ExperimentConfig, dir: &mut RunDir) -> Result<Option<String>> {
    let dist = config.appetite()?;
    let d = config.dimension;
    let moments = moment_report(&dist);
    let phase = phase_row(config, moments.mean)?;
    let eq2 = eq2_threshold(config.intensity, d, moments.mean).ok();
    dir.csv(
        "phase.csv",
        &["lambda", "alpha", "delta1", "ev", "load", "phase", "eq2_threshold"],
        &[vec![
            num(config.intensity),
            num(config.alpha),
            num(config.delta1),
            num(moments.mean),
            phase.0,
            phase.1,
            opt(eq2),
        ]],
    )?;

    let mut rows = Vec::new();
    let mut breaches = 0;
    for &lambda in &CHERNOFF_LAMBDAS {
        for &ratio in &CHERNOFF_RATIOS {
            let a = lambda * ratio;
            let bound = poisson_chernoff(lambda, a)?;
            let exact = poisson_upper_tail(lambda, a);
            breaches += usize::from(bound < exact);
            rows.push(vec![num(lambda), num(a), num(bound), num(exact)]);
        }
    }
    dir.csv("chernoff.csv", &["lambda", "a", "bound", "exact_tail"], &rows)?;

    let mut rows = Vec::new();
    match centered_moments(&dist) {
        Some((sigma2, a_plus)) if sigma2 > 0.0 && a_plus > 0.0 => {
            for &n in &NAGAEV_N {
                for &k in &NAGAEV_SIGMAS {
                    let x = k * (n as f64 * sigma2).sqrt();
                    let bound = nagaev_bound(n, x, sigma2, a_plus, config.delta)?;
                    rows.push(vec![
                        n.to_string(),
                        num(x),
                        num(sigma2),
                        num(a_plus),
                        num(config.delta),
                        num(bound),
                    ]);
                }
            }
        }
        _ => log::warn!("nagaev table left empty: the centered summand has no finite nonzero moments"),
    }
    dir.csv("nagaev.csv", &["n", "x", "sigma2", "a_plus", "delta", "bound"], &rows)?;
    Ok((breaches > 0).then(|| format!("Chernoff bound below the exact tail at {breaches} points")))
}

fn validate(config: &ExperimentConfig, dir: &mut RunDir) -> Result<Option<String>> {
    let settings = ValidationSettings {
        domain: config.domain()?,
        lambda: config.intensity,
        h: config.h,
        appetite: config.appetite()?,
        replicas: config.replicas,
        seed: config.seed,
    };
    let outcomes = run_suite(&settings)?;
    let rows: Vec<Vec<String>> = outcomes
        .iter()
        .map(|o| {
            vec![
                o.name.to_string(),
                o.trials.to_string(),
                o.failures.to_string(),
                if o.passed() { "pass" } else { "fail" }.to_string(),
                o.note.clone(),
            ]
        })
        .collect();
    dir.csv(
        "validate.csv",
        &["check", "trials", "failures", "status", "note"],
        &rows,
    )?;
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.name).collect();
    let passed = outcomes.len() - failed.len();
    println!("{passed} of {} checks passed", outcomes.len());
    Ok((!failed.is_empty()).then(|| format!("failed checks: {}", failed.join(", "))))
}
