//! Experiment configuration: a flat TOML file, versioned by `schema`.
//!
//! ```toml
//! schema = 1
//! seed = 7
//! dimension = 2
//! side = 30.0            # or: sides = [30.0, 20.0]
//! boundary = "open"      # or "periodic"
//! intensity = 1.0
//! palm = false
//! family = "exponential" # constant | exponential | pareto | lognormal
//! mean = 1.0             # family parameters: value, mean, scale, index, mu, sigma
//! alpha = 0.5
//! delta1 = 1.0
//! delta = 1.0
//! h = 0.1
//! replicas = 20
//! alpha_grid = "0.05:1.2:0.05"
//! sweep_strategy = "exhaustive"  # or "bisection"
//! out = "runs"
//! raster = true
//! ```
//!
//! Every key is optional; missing keys take the defaults below.

use std::path::{Path, PathBuf};

use marriage_core::percolation::SweepStrategy;
use marriage_core::{AppetiteDistribution, Boundary, Domain, Family, SiteGrid};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub seed: u64,
    pub dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sides: Option<Vec<f64>>,
    pub boundary: Boundary,
    pub intensity: f64,
    pub palm: bool,
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    pub alpha: f64,
    pub delta1: f64,
    pub delta: f64,
    pub h: f64,
    pub replicas: usize,
    pub alpha_grid: String,
    pub sweep_strategy: String,
    pub out: PathBuf,
    pub raster: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA,
            seed: 1,
            dimension: 2,
            side: Some(12.0),
            sides: None,
            boundary: Boundary::Periodic,
            intensity: 1.0,
            palm: false,
            family: "exponential".into(),
            value: None,
            mean: Some(1.0),
            scale: None,
            index: None,
            mu: None,
            sigma: None,
            alpha: 0.5,
            delta1: 0.5,
            delta: 1.0,
            h: 0.1,
            replicas: 8,
            alpha_grid: "0.05:1.2:0.05".into(),
            sweep_strategy: "exhaustive".into(),
            out: PathBuf::from("runs"),
            raster: true,
        }
    }
}

/// Values given on the command line, applied after the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub replicas: Option<usize>,
    pub alpha_grid: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::parse(&text)?
            }
            None => Self::default(),
        };
        if let Some(seed) = overrides.seed {
            config.seed = seed;
        }
        if let Some(out) = &overrides.out {
            config.out = out.clone();
        }
        if let Some(r) = overrides.replicas {
            config.replicas = r;
        }
        if let Some(g) = &overrides.alpha_grid {
            config.alpha_grid = g.clone();
        }
        config.check()?;
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(config)
    }

    /// Rejects anything that would fail later, before any sampling.
    pub fn check(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(CliError::Config(format!(
                "unsupported schema {} (this build reads schema {SCHEMA})",
                self.schema
            )));
        }
        if !(self.intensity.is_finite() && self.intensity > 0.0) {
            return Err(CliError::Config(format!(
                "intensity must be positive, got {}",
                self.intensity
            )));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(CliError::Config(format!("h must be positive, got {}", self.h)));
        }
        self.grid()?;
        self.appetite()?;
        self.alphas()?;
        self.strategy()?;
        Ok(())
    }

    pub fn domain(&self) -> Result<Domain> {
        let sides = match (&self.sides, self.side) {
            (Some(s), _) => s.clone(),
            (None, Some(side)) => vec![side; self.dimension],
            (None, None) => return Err(CliError::Config("set `side` or `sides`".into())),
        };
        if sides.len() != self.dimension {
            return Err(CliError::Config(format!(
                "`sides` has {} entries but dimension is {}",
                sides.len(),
                self.dimension
            )));
        }
        Domain::new(sides, self.boundary).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn grid(&self) -> Result<SiteGrid> {
        SiteGrid::new(self.domain()?, self.h).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn appetite(&self) -> Result<AppetiteDistribution> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| CliError::Config(format!("family `{}` needs `{key}`", self.family)))
        };
        let family = match self.family.as_str() {
            "constant" => Family::Constant {
                value: self.value.unwrap_or(1.0),
            },
            "exponential" => Family::Exponential {
                mean: need(self.mean, "mean")?,
            },
            "pareto" => Family::Pareto {
                scale: need(self.scale, "scale")?,
                index: need(self.index, "index")?,
            },
            "lognormal" => Family::Lognormal {
                mu: need(self.mu, "mu")?,
                sigma: need(self.sigma, "sigma")?,
            },
            other => {
                return Err(CliError::Config(format!(
                    "unknown family `{other}` (constant, exponential, pareto, lognormal)"
                )))
            }
        };
        AppetiteDistribution::new(family, self.alpha, self.delta1, self.delta)
            .map_err(|e| CliError::Config(e.to_string()))
    }

    /// The alpha grid `lo:hi:step`, inclusive of `hi` up to rounding.
    pub fn alphas(&self) -> Result<Vec<f64>> {
        parse_grid(&self.alpha_grid)
    }

    pub fn strategy(&self) -> Result<SweepStrategy> {
        match self.sweep_strategy.as_str() {
            "exhaustive" => Ok(SweepStrategy::Exhaustive),
            "bisection" => Ok(SweepStrategy::Bisection),
            other => Err(CliError::Config(format!(
                "unknown sweep_strategy `{other}` (exhaustive, bisection)"
            ))),
        }
    }

    /// The Boolean model needs truncated appetites.
    pub fn require_truncation(&self) -> Result<()> {
        if self.delta1 > 0.0 {
            Ok(())
        } else {
            Err(CliError::Config(
                "this subcommand builds the dominating Boolean model, which needs `delta1 > 0`".into(),
            ))
        }
    }
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Config(format!("alpha grid must look like lo:hi:step, got `{spec}`"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [lo, hi, step] = parts[..] else { return Err(bad()) };
    if !(lo >= 0.0 && hi >= lo && step > 0.0 && lo.is_finite() && hi.is_finite()) {
        return Err(bad());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(CliError::Config(format!("alpha grid `{spec}` has {count} points")));
    }
    // round away the drift of repeated addition
    Ok((0..count)
        .map(|k| ((lo + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}
