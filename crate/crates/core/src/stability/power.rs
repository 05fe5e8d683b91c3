use super::{DecisionVector, RateVector, SystemParams};
use crate::numerics::regularized_upper_gamma;
use crate::{Error, Result};

/// Divisions of the total power per scheduled queue in
/// [`power_region_sample`].
pub const DEFAULT_POWER_GRID: usize = 32;

const MAX_REGION_POINTS: usize = 5_000_000;

/// Per-queue departure rates under an unequal power split `p` over the
/// queues scheduled by `m`: component `ℓ` is `Γ(L−K+1, θ/P_ℓ)/Γ(L−K+1)`.
pub fn power_departure_vector(
    params: &SystemParams,
    p: &[f64],
    m: DecisionVector,
) -> Result<RateVector> {
    params.validate()?;
    let l = params.antennas;
    if p.len() != l || m.antennas() != l {
        return Err(Error::domain("power vector and decision must have one entry per queue"));
    }
    if p.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::domain("powers must be finite and nonnegative"));
    }
    let used: f64 = m.indices().iter().map(|&i| p[i]).sum();
    if used > params.power * (1.0 + 1e-12) {
        return Err(Error::PowerBudget { used, budget: params.power });
    }
    let shape = (l - m.count() + 1) as u32;
    let mut rates = vec![0.0; l];
    for i in m.indices() {
        if p[i] <= 0.0 {
            return Err(Error::domain(format!("scheduled queue {i} has no power")));
        }
        rates[i] = regularized_upper_gamma(shape, params.theta / p[i])?.get();
    }
    RateVector::new(rates)
}

/// Achievable rate vectors over every decision and every split of the full
/// power into `resolution` equal steps with each scheduled queue getting at
/// least one step, plus the origin.
///
/// The equal split appears exactly when `K` divides `resolution`.
pub fn power_region_sample(params: &SystemParams, resolution: usize) -> Result<Vec<RateVector>> {
    params.validate()?;
    if resolution < 2 {
        return Err(Error::domain("power grid resolution must be at least 2"));
    }
    let l = params.antennas;
    let mut expected = 0usize;
    for k in 1..=l.min(resolution) {
        expected = expected.saturating_add(binomial(l, k).saturating_mul(binomial(resolution - 1, k - 1)));
    }
    if expected > MAX_REGION_POINTS {
        return Err(Error::domain(format!("power grid would emit {expected} points")));
    }

    let mut out = vec![RateVector::zeros(l)];
    let step = params.power / resolution as f64;
    for mask in 1u32..1 << l {
        let m = DecisionVector::from_mask(mask, l)?;
        let idx = m.indices();
        let k = idx.len();
        if k > resolution {
            continue;
        }
        let mut parts = Vec::with_capacity(k);
        let mut failure = None;
        for_each_composition(resolution, k, &mut parts, &mut |parts| {
            let mut p = vec![0.0; l];
            for (&i, &n) in idx.iter().zip(parts) {
                p[i] = n as f64 * step;
            }
            match power_departure_vector(params, &p, m) {
                Ok(r) => out.push(r),
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    Ok(out)
}

/// Calls `f` on every composition of `total` into `k` positive parts.
fn for_each_composition(total: usize, k: usize, buf: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if k == 1 {
        buf.push(total);
        f(buf);
        buf.pop();
        return;
    }
    for first in 1..=total - (k - 1) {
        buf.push(first);
        for_each_composition(total - first, k - 1, buf, f);
        buf.pop();
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}
