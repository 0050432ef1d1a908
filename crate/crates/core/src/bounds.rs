//! Closed-form tail bounds and the phase classification.

use serde::Serialize;

use crate::appetite::{moment_report, AppetiteDistribution};
use crate::error::{Error, Result};
use crate::quadrature::integrate_to_infinity;

/// Band around `lambda * alpha * EV = 1` treated as critical.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseParams {
    pub lambda: f64,
    pub alpha: f64,
    /// Mean of `V`.
    pub ev: f64,
}

impl PhaseParams {
    pub fn new(lambda: f64, alpha: f64, ev: f64) -> Result<Self> {
        let ok = lambda.is_finite() && lambda > 0.0 && alpha.is_finite() && alpha >= 0.0 && ev.is_finite() && ev > 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "phase parameters need lambda > 0, alpha >= 0, EV > 0 (got {lambda}, {alpha}, {ev})"
            )));
        }
        Ok(Self { lambda, alpha, ev })
    }

    /// Expected appetite per unit volume.
    pub fn load(&self) -> f64 {
        self.lambda * self.alpha * self.ev
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// Every center is sated, some sites stay unclaimed.
    Subcritical,
    Critical,
    /// Every site is claimed, some centers stay unsated.
    Supercritical,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Subcritical => "subcritical",
            Phase::Critical => "critical",
            Phase::Supercritical => "supercritical",
        }
    }
}

pub fn classify_phase(p: PhaseParams) -> Phase {
    let load = p.load();
    if (load - 1.0).abs() <= CRITICAL_TOLERANCE {
        Phase::Critical
    } else if load < 1.0 {
        Phase::Subcritical
    } else {
        Phase::Supercritical
    }
}

/// Largest `alpha` for which the dominating radii are a.s. finite:
/// `(lambda 2^d E'V')^-1`.
pub fn eq2_threshold(lambda: f64, d: usize, ev_truncated: f64) -> Result<f64> {
    if !(lambda > 0.0 && ev_truncated > 0.0 && d > 0) || !lambda.is_finite() || !ev_truncated.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "threshold needs lambda > 0, d > 0, E'V' > 0 (got {lambda}, {d}, {ev_truncated})"
        )));
    }
    Ok(1.0 / (lambda * 2f64.powi(d as i32) * ev_truncated))
}

/// Fuk-Nagaev type bound on `P[S_n > x]` for a sum of `n` i.i.d. centered
/// summands with variance `sigma2` and positive-part moment `a_plus` of order
/// `2 + delta`. Clamped to 1.
pub fn nagaev_bound(n: u64, x: f64, sigma2: f64, a_plus: f64, delta: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!("x must be positive, got {x}")));
    }
    if n == 0 || !(sigma2 > 0.0 && a_plus > 0.0 && delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need n > 0, sigma2 > 0, A+ > 0, delta > 0 (got {n}, {sigma2}, {a_plus}, {delta})"
        )));
    }
    let t = 2.0 + delta;
    let n = n as f64;
    let lead = nagaev_constant(delta) * n * a_plus * x.powf(-t);
    let gauss = (-2.0 * (-t).exp() * x * x / ((4.0 + delta).powi(2) * n * sigma2)).exp();
    Ok((lead + gauss).min(1.0))
}

/// `((4 + delta) / (2 + delta))^(2 + delta)`.
pub fn nagaev_constant(delta: f64) -> f64 {
    ((4.0 + delta) / (2.0 + delta)).powf(2.0 + delta)
}

/// Variance and `E[(Z)_+^(2 + delta)]` of the centered summand
/// `Z = V' - E V'`, for the Nagaev bound. `None` when either diverges.
pub fn centered_moments(dist: &AppetiteDistribution) -> Option<(f64, f64)> {
    let report = moment_report(dist);
    if !(report.finite && report.variance.is_finite()) {
        return None;
    }
    let m = report.mean;
    let t = report.order;
    // the quantile integral over u = 1 - exp(-s), evaluated from the upper
    // tail so that large s does not round u to 1
    let integrand = |s: f64| {
        let q = (-s).exp();
        let z = dist.upper_quantile(q).max(dist.delta1) - m;
        if z > 0.0 {
            z.powf(t) * q
        } else {
            0.0
        }
    };
    let a_plus = integrate_to_infinity(integrand, 0.0, 1e-10);
    Some((report.variance, a_plus))
}

/// `g(x) = (x - 1 - ln x) / x`.
pub fn chernoff_g(x: f64) -> f64 {
    // with u = x - 1: x - 1 - ln x = u - ln(1 + u), which cancels badly near 0
    let u = x - 1.0;
    let num = if u.abs() < 1e-3 {
        // u^2/2 - u^3/3 + u^4/4 - u^5/5
        u * u * (0.5 - u * (1.0 / 3.0 - u * (0.25 - u * 0.2)))
    } else {
        u - u.ln_1p()
    };
    num / x
}

/// Chernoff bound `P[N >= a] <= exp(-lambda g(lambda / a))` for `N` Poisson
/// with mean `lambda` and `a > lambda`.
pub fn poisson_chernoff(lambda: f64, a: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if !(a > lambda) {
        return Err(Error::OutOfRange(format!(
            "the bound needs a > lambda (a = {a}, lambda = {lambda})"
        )));
    }
    Ok((-lambda * chernoff_g(lambda / a)).exp().min(1.0))
}

/// `P[N >= a]` for `N` Poisson with mean `lambda`, summed upward in log space.
pub fn poisson_upper_tail(lambda: f64, a: f64) -> f64 {
    let k0 = a.ceil().max(0.0) as u64;
    let mut log_term = -lambda + k0 as f64 * lambda.ln() - ln_factorial(k0);
    let mut sum = 0.0;
    let mut k = k0;
    loop {
        let term = log_term.exp();
        sum += term;
        if term < 1e-300 || (k as f64 > lambda && term < sum * 1e-18) {
            break;
        }
        k += 1;
        log_term += lambda.ln() - (k as f64).ln();
    }
    sum
}

fn ln_factorial(k: u64) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let p = |l, a| classify_phase(PhaseParams::new(l, a, 1.0).unwrap());
        assert_eq!(p(1.0, 0.5), Phase::Subcritical);
        assert_eq!(p(2.0, 0.5), Phase::Critical);
        assert_eq!(p(1.0, 3.0), Phase::Supercritical);
        assert_eq!(p(1.0, 0.0), Phase::Subcritical);
        assert!(PhaseParams::new(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn threshold() {
        assert_eq!(eq2_threshold(1.0, 2, 1.0).unwrap(), 0.25);
        assert_eq!(eq2_threshold(1.0, 1, 2.0).unwrap(), 0.25);
        assert_eq!(eq2_threshold(2.0, 2, 1.0).unwrap(), 0.125);
        assert!(eq2_threshold(0.0, 2, 1.0).is_err());
    }

    #[test]
    fn nagaev_shape() {
        assert_eq!(nagaev_constant(2.0), 5.0625);
        assert_eq!(nagaev_bound(10, 0.01, 1.0, 1.0, 1.0).unwrap(), 1.0);
        assert!(nagaev_bound(10, 1e6, 1.0, 1.0, 1.0).unwrap() < 1e-12);
        assert!(nagaev_bound(10, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(nagaev_bound(10, -1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn centered_exponential_moments() {
        // Z = V - 1 with V ~ Exp(1): E[Z_+^3] = 6 / e
        let d = AppetiteDistribution::new(crate::Family::Exponential { mean: 1.0 }, 1.0, 0.0, 1.0).unwrap();
        let (var, a) = centered_moments(&d).unwrap();
        assert!((var - 1.0).abs() < 1e-9);
        assert!((a - 6.0 / std::f64::consts::E).abs() < 1e-6, "{a}");
        let heavy = AppetiteDistribution::new(crate::Family::Pareto { scale: 1.0, index: 2.5 }, 1.0, 0.0, 1.0).unwrap();
        assert!(centered_moments(&heavy).is_none());
        // Pareto(1, 3.5) has mean 1.4 and E[(X - 1.4)_+^3] = 3.5 B(4, 1/2) / sqrt(1.4)
        let p = AppetiteDistribution::new(crate::Family::Pareto { scale: 1.0, index: 3.5 }, 1.0, 0.0, 1.0).unwrap();
        let (_, a) = centered_moments(&p).unwrap();
        let exact = 3.5 * (6.0 / (3.5 * 2.5 * 1.5 * 0.5)) / 1.4f64.sqrt();
        assert!((a - exact).abs() < 1e-6 * exact, "{a} vs {exact}");
    }

    #[test]
    fn g_is_smooth_through_one() {
        assert_eq!(chernoff_g(1.0), 0.0);
        for &x in &[0.9989, 0.9995, 1.0005, 1.0011, 0.5, 2.0] {
            let direct = (x - 1.0 - f64::ln(x)) / x;
            assert!(
                (chernoff_g(x) - direct).abs() < 1e-12 * (1.0 + direct.abs()) + 1e-15,
                "{x}"
            );
        }
    }

    #[test]
    fn chernoff_limits() {
        assert!(poisson_chernoff(10.0, 10.0).is_err());
        assert!(poisson_chernoff(10.0, 5.0).is_err());
        assert!(poisson_chernoff(10.0, 10.0 * (1.0 + 1e-12)).unwrap() > 1.0 - 1e-9);
        assert!(poisson_chernoff(1.0, 1e9).unwrap() < 1e-100);
        let mut prev = 1.0;
        for k in 1..50 {
            let v = poisson_chernoff(5.0, 5.0 + k as f64 * 0.5).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }
}
