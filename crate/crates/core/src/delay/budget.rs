use serde::{Deserialize, Serialize};

use crate::stability::SystemParams;
use crate::{Error, Result};

/// Bit offset `κ = (L−1) log₂(L (1+Lθ)(1+θ/P))` shared by all budgets.
pub fn kappa(params: &SystemParams) -> Result<f64> {
    params.validate()?;
    let l = params.antennas;
    if l < 2 {
        return Err(Error::Unsupported("feedback budgets need at least two antennas".into()));
    }
    let lf = l as f64;
    Ok((lf - 1.0)
        * (lf * (1.0 + lf * params.theta) * (1.0 + params.theta / params.power)).log2())
}

/// Per-mobile feedback bits for a loss target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeedbackBudget {
    /// The target the budget was computed for (`δ` or `η`).
    pub target: f64,
    pub kappa: f64,
    pub bits_real: f64,
    /// `⌈bits_real⌉`.
    pub bits: u32,
}

fn budget(params: &SystemParams, target: f64, name: &str) -> Result<FeedbackBudget> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::domain(format!("{name} must lie in (0, 1), got {target}")));
    }
    let kappa = kappa(params)?;
    let bits_real = -((params.antennas - 1) as f64) * target.log2() + kappa;
    Ok(FeedbackBudget { target, kappa, bits_real, bits: bits_real.ceil() as u32 })
}

/// Bits keeping every departure rate within a factor `1−δ` of its
/// perfect-CSI value: `B(δ) = −(L−1) log₂ δ + κ`.
pub fn feedback_bits_for_delta(params: &SystemParams, delta: f64) -> Result<FeedbackBudget> {
    budget(params, delta, "delta")
}

/// Leading-order bits for a `(1+η)` inflation of the delay tail bound:
/// `B = −(L−1) log₂ η + κ`.
pub fn bits_for_eta(params: &SystemParams, eta: f64) -> Result<FeedbackBudget> {
    budget(params, eta, "eta")
}

/// Pollaczek-Khinchin mean waiting time of Poisson(λ) arrivals with
/// geometric(μ̂) ARQ service, `λ(2−μ̂) / (2μ̂(μ̂−λ))` slots.
pub fn pk_average_delay(lambda: f64, mu_hat: f64) -> Result<f64> {
    if !(mu_hat > 0.0 && mu_hat <= 1.0) {
        return Err(Error::domain(format!("service probability must lie in (0, 1], got {mu_hat}")));
    }
    if !(lambda >= 0.0) {
        return Err(Error::domain("arrival rate must be nonnegative"));
    }
    if lambda >= mu_hat {
        return Err(Error::UnstableQueue { lambda, mu: mu_hat });
    }
    Ok(lambda * (2.0 - mu_hat) / (2.0 * mu_hat * (mu_hat - lambda)))
}

/// Which closed form of the loss factor `δ⁺` to use for a delay-ratio
/// target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaVariant {
    /// `½[1 − √(1 − 4(1−1/M)τ/(1+τ)²)]`. Keeps the Pollaczek-Khinchin ratio
    /// `Ŵ/W` at or below `M`.
    #[default]
    Guaranteed,
    /// The same bracket scaled by `(1+τ)/2`, i.e. the smaller root of
    /// `δ² − (1+τ)δ + (1−1/M)τ = 0`. It bounds `τ/((1−δ)(τ−δ))` by `M`, but
    /// that expression omits the factor `(2−μ̂)/(2−μ) > 1` of the exact ratio,
    /// so `Ŵ/W` can exceed `M` with this variant.
    Relaxed,
}

impl DeltaVariant {
    fn prefactor(self, tau: f64) -> f64 {
        match self {
            DeltaVariant::Guaranteed => 0.5,
            DeltaVariant::Relaxed => 0.5 * (1.0 + tau),
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain(format!("tau must lie in (0, 1), got {tau}")));
    }
    Ok(())
}

/// Loss factor `δ⁺` keeping the delay inflation `Ŵ/W` at most `m`, where
/// `τ = 1 − λ/μ` is the perfect-CSI load margin.
pub fn delta_for_delay_ratio(m: f64, tau: f64, variant: DeltaVariant) -> Result<f64> {
    check_tau(tau)?;
    if !(m > 1.0) {
        return Err(Error::domain(format!(
            "delay ratio must exceed 1 (M = {m} needs infinitely many bits)"
        )));
    }
    let x = 1.0 - 1.0 / m;
    let disc = 1.0 - 4.0 * x * tau / (1.0 + tau).powi(2);
    Ok(variant.prefactor(tau) * (1.0 - disc.sqrt()))
}

/// Exact budget for a delay-ratio target: `B(δ⁺)`.
pub fn bits_for_delay_ratio(
    params: &SystemParams,
    m: f64,
    tau: f64,
    variant: DeltaVariant,
) -> Result<FeedbackBudget> {
    feedback_bits_for_delta(params, delta_for_delay_ratio(m, tau, variant)?)
}

/// Delay ratio guaranteed by `bits` feedback bits: the inverse of
/// [`bits_for_delay_ratio`]. Infinite when the budget is too small to
/// guarantee any finite ratio.
pub fn delay_ratio_for_bits(
    params: &SystemParams,
    bits: f64,
    tau: f64,
    variant: DeltaVariant,
) -> Result<f64> {
    check_tau(tau)?;
    let k = kappa(params)?;
    let delta = (-(bits - k) / (params.antennas - 1) as f64).exp2();
    let x = match variant {
        DeltaVariant::Guaranteed => {
            if delta >= 0.5 {
                return Ok(f64::INFINITY);
            }
            (delta - delta * delta) * (1.0 + tau).powi(2) / tau
        }
        DeltaVariant::Relaxed => {
            if delta >= 0.5 * (1.0 + tau) {
                return Ok(f64::INFINITY);
            }
            delta * (1.0 + tau - delta) / tau
        }
    };
    Ok(if x < 1.0 { 1.0 / (1.0 - x) } else { f64::INFINITY })
}

/// Large-`M` approximations of the delay-ratio budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticBits {
    /// `(L−1) log₂(M/(M−1)) + (L−1) log₂((1+τ)²/τ) + κ`.
    pub full: f64,
    /// `(L−1) log₂(M/(M−1)) + κ`.
    pub simplified: f64,
}

pub fn bits_for_delay_ratio_asymptotic(
    params: &SystemParams,
    m: f64,
    tau: f64,
) -> Result<AsymptoticBits> {
    check_tau(tau)?;
    if !(m > 1.0) {
        return Err(Error::domain(format!("delay ratio must exceed 1, got {m}")));
    }
    let k = kappa(params)?;
    let l1 = (params.antennas - 1) as f64;
    let simplified = l1 * (m / (m - 1.0)).log2() + k;
    Ok(AsymptoticBits { full: simplified + l1 * ((1.0 + tau).powi(2) / tau).log2(), simplified })
}

/// One row of the delay-ratio versus bits curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayRatioPoint {
    pub bits: f64,
    /// From `δ⁺` and `B(δ)`.
    pub m_exact: f64,
    /// Inverse of the simplified asymptote.
    pub m_asymptotic: f64,
    /// Inverse of the full asymptote.
    pub m_asymptotic_full: f64,
}

/// Delay ratio against bits for exact and asymptotic budgets.
pub fn delay_ratio_curve(
    params: &SystemParams,
    tau: f64,
    variant: DeltaVariant,
    bits: &[f64],
) -> Result<Vec<DelayRatioPoint>> {
    check_tau(tau)?;
    let k = kappa(params)?;
    let l1 = (params.antennas - 1) as f64;
    let invert = |y: f64| if y > 1.0 { y / (y - 1.0) } else { f64::INFINITY };
    bits.iter()
        .map(|&b| {
            let y = ((b - k) / l1).exp2();
            Ok(DelayRatioPoint {
                bits: b,
                m_exact: delay_ratio_for_bits(params, b, tau, variant)?,
                m_asymptotic: invert(y),
                m_asymptotic_full: invert(y * tau / (1.0 + tau).powi(2)),
            })
        })
        .collect()
}

/// Exportable budget record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetReport {
    pub inputs: serde_json::Value,
    pub bits_real: f64,
    pub bits: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<DeltaVariant>,
    /// `(t, bound)` samples of a tail bound, when one applies.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bound_curve: Vec<(f64, f64)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig3() -> SystemParams {
        SystemParams::new(3, 10f64.powf(1.2), 3.0).unwrap()
    }

    #[test]
    fn kappa_values() {
        let k = kappa(&SystemParams::new(2, 1.0, 0.0).unwrap()).unwrap();
        assert!((k - 1.0).abs() < 1e-15);
        let p = fig3();
        let oracle = 2.0 * (3.0f64 * 10.0 * (1.0 + 3.0 / p.power)).log2();
        assert!((kappa(&p).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 10.31).abs() < 0.01);
        let big = SystemParams::new(3, 1e12, 3.0).unwrap();
        assert!((kappa(&big).unwrap() - 2.0 * 30f64.log2()).abs() < 1e-9);
        assert!(matches!(kappa(&SystemParams::new(1, 1.0, 1.0).unwrap()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn delta_budget() {
        let b = feedback_bits_for_delta(&fig3(), 0.1).unwrap();
        assert!((b.bits_real - (2.0 * 10f64.log2() + b.kappa)).abs() < 1e-12);
        assert!((b.bits_real - 16.95).abs() < 0.01);
        assert_eq!(b.bits, 17);
        let near_one = feedback_bits_for_delta(&fig3(), 1.0 - 1e-12).unwrap();
        assert!((near_one.bits_real - near_one.kappa).abs() < 1e-9);
        assert!(feedback_bits_for_delta(&fig3(), 0.0).is_err());
        assert!(feedback_bits_for_delta(&fig3(), 1.0).is_err());
    }

    #[test]
    fn eta_budget() {
        let b = bits_for_eta(&fig3(), 0.05).unwrap();
        assert!((b.bits_real - (2.0 * 20f64.log2() + b.kappa)).abs() < 1e-12);
        assert!((b.bits_real - 18.95).abs() < 0.01);
        let half = bits_for_eta(&fig3(), 0.025).unwrap();
        assert!((half.bits_real - b.bits_real - 2.0).abs() < 1e-12);
        assert!(bits_for_eta(&fig3(), 1.5).is_err());
    }

    #[test]
    fn pk_values() {
        assert!((pk_average_delay(0.5, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((pk_average_delay(0.5, 0.8).unwrap() - 1.25).abs() < 1e-12);
        assert_eq!(pk_average_delay(0.0, 0.8).unwrap(), 0.0);
        assert!(matches!(pk_average_delay(0.8, 0.8), Err(Error::UnstableQueue { .. })));
        assert!(pk_average_delay(0.1, 0.0).is_err());
    }

    #[test]
    fn delta_plus_values() {
        let bracket = 1.0 - (1.0 - 4.0 * (1.0 / 3.0) * 0.5 / 2.25f64).sqrt();
        let p = delta_for_delay_ratio(1.5, 0.5, DeltaVariant::Guaranteed).unwrap();
        let a = delta_for_delay_ratio(1.5, 0.5, DeltaVariant::Relaxed).unwrap();
        assert!((p - 0.5 * bracket).abs() < 1e-15);
        assert!((a - 0.75 * bracket).abs() < 1e-15);
        // bracket ≈ 0.1611
        assert!((p - 0.0806).abs() < 1e-4 && (a - 0.1208).abs() < 1e-4);
        assert!(delta_for_delay_ratio(1.0 + 1e-12, 0.5, DeltaVariant::Relaxed).unwrap() < 1e-11);
        assert!(delta_for_delay_ratio(1.0, 0.5, DeltaVariant::Relaxed).is_err());
        assert!(delta_for_delay_ratio(2.0, 1.0, DeltaVariant::Relaxed).is_err());
    }

    #[test]
    fn asymptote_values() {
        let p = fig3();
        let a = bits_for_delay_ratio_asymptotic(&p, 2.0, 0.5).unwrap();
        let k = kappa(&p).unwrap();
        assert!((a.full - (2.0 + 2.0 * 4.5f64.log2() + k)).abs() < 1e-12);
        assert!((2.0 * 4.5f64.log2() - 4.340).abs() < 1e-3);
        assert!((a.simplified - (2.0 + k)).abs() < 1e-12);
        let far = bits_for_delay_ratio_asymptotic(&p, 1e9, 0.5).unwrap();
        assert!((far.full - 2.0 * 4.5f64.log2() - k).abs() < 1e-6);
    }

    #[test]
    fn inverse_roundtrip() {
        let p = fig3();
        for variant in [DeltaVariant::Guaranteed, DeltaVariant::Relaxed] {
            for m in [1.1, 1.5, 3.0, 20.0] {
                let b = bits_for_delay_ratio(&p, m, 0.4, variant).unwrap();
                let back = delay_ratio_for_bits(&p, b.bits_real, 0.4, variant).unwrap();
                assert!((back - m).abs() < 1e-9 * m, "{variant:?} {m} {back}");
            }
        }
        assert_eq!(delay_ratio_for_bits(&p, 0.0, 0.4, DeltaVariant::Relaxed).unwrap(), f64::INFINITY);
        let curve = delay_ratio_curve(&p, 0.4, DeltaVariant::Relaxed, &[12.0, 20.0]).unwrap();
        assert!(curve[1].m_exact < curve[0].m_exact);
    }

    proptest! {
        #[test]
        fn budget_slope_is_l_minus_one(l in 2usize..8, delta in 1e-6f64..0.99, f in 0.01f64..0.99) {
            let p = SystemParams::new(l, 10.0, 2.0).unwrap();
            let a = feedback_bits_for_delta(&p, delta).unwrap();
            let b = feedback_bits_for_delta(&p, delta * f).unwrap();
            prop_assert!(b.bits_real > a.bits_real);
            let slope = (b.bits_real - a.bits_real) / (1.0 / f).log2();
            prop_assert!((slope - (l - 1) as f64).abs() < 1e-9);
        }

        #[test]
        fn delta_plus_meets_delay_target(lambda in 0.01f64..0.95, mu_frac in 0.05f64..0.99, m in 1.01f64..10.0) {
            // μ ∈ (λ, 1), τ = 1 − λ/μ.
            let mu = lambda + (1.0 - lambda) * mu_frac;
            let tau = 1.0 - lambda / mu;
            let w = pk_average_delay(lambda, mu).unwrap();
            let ratio = |d: f64| pk_average_delay(lambda, (1.0 - d) * mu).unwrap() / w;
            let chain = |d: f64| tau / ((1.0 - d) * (tau - d));

            let p = delta_for_delay_ratio(m, tau, DeltaVariant::Guaranteed).unwrap();
            prop_assert!(p < tau);
            prop_assert!(ratio(p) <= m * (1.0 + 1e-7));

            let a = delta_for_delay_ratio(m, tau, DeltaVariant::Relaxed).unwrap();
            prop_assert!(a >= p && a < tau);
            prop_assert!((chain(a) - m).abs() <= 1e-9 * m);
            for d in [p, a] {
                let mu_hat = (1.0 - d) * mu;
                let exact = chain(d) * (2.0 - mu_hat) / (2.0 - mu);
                prop_assert!((ratio(d) - exact).abs() <= 1e-9 * exact);
            }
        }
    }
}
