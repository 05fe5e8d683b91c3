use serde::Serialize;

use super::{RateVector, StationaryPolicy, SystemParams};
use crate::numerics::{regularized_upper_gamma, Probability};
use crate::{Error, Result};

/// Per-queue success probability when `k` queues are served with perfect
/// CSI: `d(k) = Γ(L−k+1, kθ/P) / Γ(L−k+1)`.
pub fn departure_rate(params: &SystemParams, k: usize) -> Result<Probability> {
    params.validate()?;
    let l = params.antennas;
    if k == 0 || k > l {
        return Err(Error::domain(format!("scheduled count must be in 1..={l}, got {k}")));
    }
    regularized_upper_gamma((l - k + 1) as u32, k as f64 * params.theta / params.power)
}

/// `d(0), d(1), …, d(L)` with `d(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RateTable(Vec<f64>);

impl RateTable {
    pub fn new(params: &SystemParams) -> Result<Self> {
        let mut d = vec![0.0];
        for k in 1..=params.antennas {
            d.push(departure_rate(params, k)?.get());
        }
        Ok(RateTable(d))
    }

    /// Uses arbitrary per-count rates, e.g. Monte-Carlo estimates under
    /// limited feedback. `rates[0]` is `d(1)`.
    pub fn from_rates(rates: &[f64]) -> Result<Self> {
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::domain("departure rates must lie in [0, 1]"));
        }
        let mut d = vec![0.0];
        d.extend_from_slice(rates);
        Ok(RateTable(d))
    }

    /// `d(k)`, with `d(0) = 0`.
    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    pub fn antennas(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Long-run departure-rate vector of a stationary policy,
/// `Σ_v p(v) d(‖v‖₁) v`.
pub fn conditional_departure_vector(
    params: &SystemParams,
    policy: &StationaryPolicy,
) -> Result<RateVector> {
    let l = params.antennas;
    if policy.antennas() != l {
        return Err(Error::domain("policy and parameters disagree on the queue count"));
    }
    let table = RateTable::new(params)?;
    let mut mu = vec![0.0; l];
    for (mask, &p) in policy.weights().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let k = (mask as u32).count_ones() as usize;
        let rate = p * table.get(k);
        for (i, m) in mu.iter_mut().enumerate() {
            if mask >> i & 1 == 1 {
                *m += rate;
            }
        }
    }
    RateVector::new(mu)
}
