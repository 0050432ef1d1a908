//! Random appetites `alpha * max(V, delta1)`.
//!
//! Every sample is driven by a single uniform through the quantile function of
//! `V`. Reusing the uniform across different `alpha` or `delta1` values gives
//! the pathwise couplings that the monotonicity properties rely on.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{Error, Result};

/// The law of the untruncated variable `V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// `V = value` almost surely.
    Constant {
        value: f64,
    },
    Exponential {
        mean: f64,
    },
    /// Density `index * scale^index / v^(index + 1)` on `v >= scale`.
    Pareto {
        scale: f64,
        index: f64,
    },
    /// `V = exp(mu + sigma * Z)` with `Z` standard normal.
    Lognormal {
        mu: f64,
        sigma: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppetiteDistribution {
    pub family: Family,
    /// Scale constant in front of the appetite.
    pub alpha: f64,
    /// Lower truncation level; `0` means no truncation.
    pub delta1: f64,
    /// Excess moment order: moment checks use order `2 + delta`.
    pub delta: f64,
}

impl AppetiteDistribution {
    pub fn new(family: Family, alpha: f64, delta1: f64, delta: f64) -> Result<Self> {
        let dist = Self {
            family,
            alpha,
            delta1,
            delta,
        };
        dist.validate()?;
        Ok(dist)
    }

    /// Constant appetite `alpha * max(value, delta1)`.
    pub fn constant(value: f64, alpha: f64, delta1: f64) -> Result<Self> {
        Self::new(Family::Constant { value }, alpha, delta1, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad(format!("alpha must be finite and >= 0, got {}", self.alpha));
        }
        if !(self.delta1.is_finite() && self.delta1 >= 0.0) {
            return bad(format!("delta1 must be finite and >= 0, got {}", self.delta1));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return bad(format!("delta must be positive, got {}", self.delta));
        }
        match self.family {
            Family::Constant { value } if !(value.is_finite() && value >= 0.0) => {
                bad(format!("constant value must be >= 0, got {value}"))
            }
            Family::Exponential { mean } if !(mean.is_finite() && mean > 0.0) => {
                bad(format!("exponential mean must be positive, got {mean}"))
            }
            Family::Pareto { scale, index }
                if !(scale.is_finite() && scale > 0.0 && index.is_finite() && index > 0.0) =>
            {
                bad(format!("pareto needs scale > 0 and index > 0, got ({scale}, {index})"))
            }
            Family::Lognormal { mu, sigma } if !(mu.is_finite() && sigma.is_finite() && sigma > 0.0) => {
                bad(format!("lognormal needs finite mu and sigma > 0, got ({mu}, {sigma})"))
            }
            _ => Ok(()),
        }
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..self.clone() }
    }

    pub fn with_delta1(&self, delta1: f64) -> Self {
        Self { delta1, ..self.clone() }
    }

    /// Quantile of the untruncated `V` at `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self.family {
            Family::Constant { value } => value,
            Family::Exponential { mean } => -mean * (-u).ln_1p(),
            Family::Pareto { scale, index } => scale * (1.0 - u).powf(-1.0 / index),
            Family::Lognormal { mu, sigma } => {
                if u <= 0.0 {
                    0.0
                } else {
                    (mu + sigma * standard_normal().inverse_cdf(u)).exp()
                }
            }
        }
    }

    /// Quantile at `u = 1 - q`, accurate for `q` near 0 where `1 - q` would
    /// round to 1.
    pub fn upper_quantile(&self, q: f64) -> f64 {
        match self.family {
            Family::Constant { value } => value,
            Family::Exponential { mean } => -mean * q.ln(),
            Family::Pareto { scale, index } => scale * q.powf(-1.0 / index),
            Family::Lognormal { mu, sigma } => {
                if q >= 1.0 {
                    0.0
                } else {
                    (mu - sigma * standard_normal().inverse_cdf(q)).exp()
                }
            }
        }
    }

    /// `max(V, delta1)` for the uniform `u`, without the `alpha` factor.
    #[inline]
    pub fn truncated_from_uniform(&self, u: f64) -> f64 {
        self.quantile(u).max(self.delta1)
    }

    /// The appetite `alpha * max(V, delta1)` for the uniform `u`.
    #[inline]
    pub fn from_uniform(&self, u: f64) -> f64 {
        if self.alpha == 0.0 {
            return 0.0;
        }
        self.alpha * self.truncated_from_uniform(u)
    }

    /// Smallest appetite this distribution can produce when truncation is on.
    pub fn floor(&self) -> f64 {
        self.alpha * self.delta1
    }

    pub fn moment_order(&self) -> f64 {
        2.0 + self.delta
    }
}

fn standard_normal() -> Normal {
    Normal::standard()
}

/// Draws one appetite.
pub fn sample_appetite<R: Rng + ?Sized>(dist: &AppetiteDistribution, rng: &mut R) -> Result<f64> {
    dist.validate()?;
    Ok(dist.from_uniform(rng.random::<f64>()))
}

/// Moments of the truncated variable `V' = max(V, delta1)` (no `alpha`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean: f64,
    pub variance: f64,
    /// `E[V'^(2 + delta)]`.
    pub upper_moment: f64,
    pub order: f64,
    /// False when the `(2 + delta)`-moment diverges.
    pub finite: bool,
}

/// `E[max(V, t)^p]` in closed form. Infinite when the moment diverges.
pub fn truncated_raw_moment(family: &Family, t: f64, p: f64) -> f64 {
    let tp = if t > 0.0 { t.powf(p) } else { 0.0 };
    match *family {
        Family::Constant { value } => value.max(t).powf(p),
        Family::Exponential { mean } => {
            // t^p P[V <= t] + m^p Gamma(p + 1, t / m)
            let z = t / mean;
            let below = if t > 0.0 { tp * (-(-z).exp_m1()).max(0.0) } else { 0.0 };
            let upper = if z > 0.0 { gamma_ur(p + 1.0, z) } else { 1.0 };
            below + mean.powf(p) * gamma(p + 1.0) * upper
        }
        Family::Pareto { scale, index } => {
            if p >= index {
                return f64::INFINITY;
            }
            if t <= scale {
                index * scale.powf(p) / (index - p)
            } else {
                tp * (1.0 - (scale / t).powf(index)) + index * scale.powf(index) * t.powf(p - index) / (index - p)
            }
        }
        Family::Lognormal { mu, sigma } => {
            let n = standard_normal();
            let full = (p * mu + 0.5 * p * p * sigma * sigma).exp();
            if t <= 0.0 {
                return full;
            }
            let lt = t.ln();
            tp * n.cdf((lt - mu) / sigma) + full * n.cdf((mu + p * sigma * sigma - lt) / sigma)
        }
    }
}

/// Mean, variance and `(2 + delta)`-moment of `max(V, delta1)`.
pub fn moment_report(dist: &AppetiteDistribution) -> MomentReport {
    let t = dist.delta1;
    let order = dist.moment_order();
    let mean = truncated_raw_moment(&dist.family, t, 1.0);
    let second = truncated_raw_moment(&dist.family, t, 2.0);
    let upper_moment = truncated_raw_moment(&dist.family, t, order);
    let variance = if second.is_finite() {
        (second - mean * mean).max(0.0)
    } else {
        f64::INFINITY
    };
    MomentReport {
        mean,
        variance,
        upper_moment,
        order,
        finite: upper_moment.is_finite(),
    }
}
