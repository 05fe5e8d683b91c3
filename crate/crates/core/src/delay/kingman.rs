use serde::{Deserialize, Serialize};

use crate::numerics::{find_root_bracketed, RngStream};
use crate::{Error, Result};

/// Tolerance on the root-equation residual.
pub const ROOT_TOL: f64 = 1e-13;

/// Inter-arrival time law, in slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArrivalLaw {
    /// Poisson arrivals with `rate` packets per slot.
    Exponential { rate: f64 },
    /// One arrival every `period` slots.
    Deterministic { period: f64 },
    /// I.i.d. resampling of observed inter-arrival times.
    Empirical { samples: Vec<f64> },
}

impl ArrivalLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ArrivalLaw::Exponential { rate } => *rate > 0.0 && rate.is_finite(),
            ArrivalLaw::Deterministic { period } => *period > 0.0 && period.is_finite(),
            ArrivalLaw::Empirical { samples } => {
                !samples.is_empty()
                    && samples.iter().all(|x| x.is_finite() && *x >= 0.0)
                    && samples.iter().any(|x| *x > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("invalid arrival law {self:?}")))
        }
    }

    /// `E[X]`.
    pub fn mean(&self) -> f64 {
        match self {
            ArrivalLaw::Exponential { rate } => 1.0 / rate,
            ArrivalLaw::Deterministic { period } => *period,
            ArrivalLaw::Empirical { samples } => samples.iter().sum::<f64>() / samples.len() as f64,
        }
    }

    /// Arrival rate `1/E[X]`.
    pub fn rate(&self) -> f64 {
        match self {
            ArrivalLaw::Exponential { rate } => *rate,
            _ => 1.0 / self.mean(),
        }
    }

    /// `E[e^{−rX}]`.
    pub fn laplace(&self, r: f64) -> f64 {
        match self {
            ArrivalLaw::Exponential { rate } => rate / (rate + r),
            ArrivalLaw::Deterministic { period } => (-r * period).exp(),
            ArrivalLaw::Empirical { samples } => {
                samples.iter().map(|x| (-r * x).exp()).sum::<f64>() / samples.len() as f64
            }
        }
    }

    /// `E[X e^{−rX}]`.
    pub fn laplace_weighted(&self, r: f64) -> f64 {
        match self {
            ArrivalLaw::Exponential { rate } => rate / (rate + r).powi(2),
            ArrivalLaw::Deterministic { period } => period * (-r * period).exp(),
            ArrivalLaw::Empirical { samples } => {
                samples.iter().map(|x| x * (-r * x).exp()).sum::<f64>() / samples.len() as f64
            }
        }
    }

    /// Standard error of the sample-mean estimates of `E[e^{−rX}]` and
    /// `E[X e^{−rX}]`; zero for closed-form laws.
    pub fn transform_std_errors(&self, r: f64) -> (f64, f64) {
        let ArrivalLaw::Empirical { samples } = self else {
            return (0.0, 0.0);
        };
        let n = samples.len() as f64;
        if samples.len() < 2 {
            return (f64::NAN, f64::NAN);
        }
        let se = |f: &dyn Fn(f64) -> f64| {
            let m = samples.iter().map(|&x| f(x)).sum::<f64>() / n;
            let v = samples.iter().map(|&x| (f(x) - m).powi(2)).sum::<f64>() / (n - 1.0);
            (v / n).sqrt()
        };
        (se(&|x| (-r * x).exp()), se(&|x| x * (-r * x).exp()))
    }

    /// Draws one inter-arrival time.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match self {
            ArrivalLaw::Exponential { rate } => rng.exponential() / rate,
            ArrivalLaw::Deterministic { period } => *period,
            ArrivalLaw::Empirical { samples } => samples[rng.below(samples.len())],
        }
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::domain(format!("service probability must lie in (0, 1], got {mu}")));
    }
    Ok(())
}

/// Left side of the exponent equation,
/// `μ E[e^{−rX}] − e^{−r} + 1 − μ`.
fn residual(law: &ArrivalLaw, mu: f64, r: f64) -> f64 {
    mu * law.laplace(r) - (-r).exp() + 1.0 - mu
}

/// Kingman tail exponent `r★ > 0` of a queue with inter-arrival law `law`
/// and geometric ARQ service with success probability `mu`: the positive
/// root of `μ E[e^{−rX}] − e^{−r} + 1 − μ = 0` on `(0, −ln(1−μ))`.
pub fn kingman_exponent(law: &ArrivalLaw, mu: f64) -> Result<f64> {
    law.validate()?;
    check_mu(mu)?;
    let lambda = law.rate();
    if lambda >= mu {
        return Err(Error::UnstableQueue { lambda, mu });
    }
    let phi = |r: f64| residual(law, mu, r);
    let upper = -(1.0 - mu).ln();

    // φ(0) = 0 and φ'(0) = 1 − μE[X] < 0, so φ dips below zero right of
    // the origin and crosses back at r★.
    let hi = if upper.is_finite() {
        upper
    } else {
        let mut hi = 1.0;
        let mut n = 0;
        while phi(hi) <= 0.0 {
            hi *= 2.0;
            n += 1;
            if n > 60 {
                return Err(Error::NoPositiveRoot(format!(
                    "equation stays negative for all r with μ = 1 and {law:?}"
                )));
            }
        }
        hi
    };
    let mut lo = 0.5 * hi;
    let mut n = 0;
    while phi(lo) >= 0.0 {
        lo *= 0.5;
        n += 1;
        if n > 1000 || lo == 0.0 {
            return Err(Error::NoPositiveRoot("no negative value left of the upper end".into()));
        }
    }
    if phi(hi) <= 0.0 {
        return Err(Error::ConvergenceWindow { upper });
    }
    let r = find_root_bracketed(phi, lo, hi, ROOT_TOL)?;
    if upper.is_finite() && r >= upper * (1.0 - 1e-12) {
        return Err(Error::ConvergenceWindow { upper });
    }
    Ok(r)
}

/// First-order sensitivity of the exponent to a relative service loss `σ`,
/// `f(r★) = (1 − e^{−r★}) / (e^{−r★} − μ E[X e^{−r★X}])`, so that the
/// exponent at `μ̂ = (1−σ)μ` is `r★ − f(r★)σ + O(σ²)`.
pub fn perturbation_coefficient(law: &ArrivalLaw, mu: f64, r_star: f64) -> Result<f64> {
    law.validate()?;
    check_mu(mu)?;
    if !(r_star > 0.0 && r_star.is_finite()) {
        return Err(Error::domain("exponent must be positive and finite"));
    }
    let den = (-r_star).exp() - mu * law.laplace_weighted(r_star);
    if den.abs() < 1e-12 {
        return Err(Error::SingularPerturbation(den));
    }
    Ok((1.0 - (-r_star).exp()) / den)
}

/// Exponents with and without a relative service loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KingmanResult {
    /// Exponent at the nominal service probability `μ`.
    pub r_star: f64,
    /// Exponent at `μ̂ = (1−σ)μ`.
    pub r_hat: f64,
    pub sigma: f64,
    /// `f(r★)`.
    pub f: f64,
    /// First-order prediction `r★ − f(r★)σ`.
    pub r_hat_first_order: f64,
    /// Upper end `−ln(1−μ̂)` of the window holding `r_hat`.
    pub window_upper: f64,
    /// Equation residual at `r_hat`.
    pub residual: f64,
}

pub fn kingman_analysis(law: &ArrivalLaw, mu: f64, sigma: f64) -> Result<KingmanResult> {
    if !(0.0..1.0).contains(&sigma) {
        return Err(Error::domain(format!("sigma must lie in [0, 1), got {sigma}")));
    }
    let r_star = kingman_exponent(law, mu)?;
    let mu_hat = (1.0 - sigma) * mu;
    let r_hat = if sigma == 0.0 { r_star } else { kingman_exponent(law, mu_hat)? };
    let f = perturbation_coefficient(law, mu, r_star)?;
    Ok(KingmanResult {
        r_star,
        r_hat,
        sigma,
        f,
        r_hat_first_order: r_star - f * sigma,
        window_upper: -(1.0 - mu_hat).ln(),
        residual: residual(law, mu_hat, r_hat),
    })
}

/// `(t, (1+η) e^{−r t})` at the given delays.
pub fn ccdf_bound_curve(r: f64, eta: f64, ts: &[f64]) -> Vec<(f64, f64)> {
    ts.iter().map(|&t| (t, (1.0 + eta) * (-r * t).exp())).collect()
}
