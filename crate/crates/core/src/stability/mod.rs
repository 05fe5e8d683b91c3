//! Departure rates, the stability polytope and control policies.

mod policy;
mod polytope;
mod power;
mod rates;

pub use policy::{max_weight_decision, StationaryPolicy};
pub use polytope::{index_set, stability_polytope, Decomposition, StabilityPolytope, Vertex};
pub use power::{power_departure_vector, power_region_sample, DEFAULT_POWER_GRID};
pub use rates::{conditional_departure_vector, departure_rate, RateTable};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, MAX_ANTENNAS};

/// Antenna/user count, total transmit power (linear), SINR threshold
/// (linear) and optional per-mobile feedback bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub antennas: usize,
    pub power: f64,
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback_bits: Option<u32>,
}

impl SystemParams {
    pub fn new(antennas: usize, power: f64, theta: f64) -> Result<Self> {
        let p = SystemParams { antennas, power, theta, feedback_bits: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_feedback_bits(mut self, bits: u32) -> Result<Self> {
        self.feedback_bits = Some(bits);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 || self.antennas > MAX_ANTENNAS {
            return Err(Error::domain(format!(
                "antenna count must be in 1..={MAX_ANTENNAS}, got {}",
                self.antennas
            )));
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(Error::domain("power must be positive and finite"));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::domain("theta must be nonnegative and finite"));
        }
        if self.feedback_bits == Some(0) {
            return Err(Error::domain("feedback bits must be at least 1"));
        }
        Ok(())
    }
}

/// Set of scheduled queues, stored as a bitmask over `antennas` queues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecisionVector {
    mask: u32,
    antennas: usize,
}

impl DecisionVector {
    pub fn empty(antennas: usize) -> Self {
        DecisionVector { mask: 0, antennas }
    }

    pub fn from_mask(mask: u32, antennas: usize) -> Result<Self> {
        if antennas > MAX_ANTENNAS || (antennas < 32 && mask >> antennas != 0) {
            return Err(Error::domain(format!("mask {mask:#b} does not fit {antennas} queues")));
        }
        Ok(DecisionVector { mask, antennas })
    }

    pub fn from_indices(indices: &[usize], antennas: usize) -> Result<Self> {
        let mut mask = 0u32;
        for &i in indices {
            if i >= antennas {
                return Err(Error::domain(format!("queue {i} out of range")));
            }
            mask |= 1 << i;
        }
        Self::from_mask(mask, antennas)
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    /// Number of scheduled queues `K`.
    pub fn count(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.antennas && self.mask >> i & 1 == 1
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.antennas).filter(|&i| self.contains(i)).collect()
    }

    /// 0/1 flags.
    pub fn flags(&self) -> Vec<u8> {
        (0..self.antennas).map(|i| self.contains(i) as u8).collect()
    }

    /// Restricts the decision to the queues in `allowed`.
    pub fn masked(&self, allowed: u32) -> Self {
        DecisionVector { mask: self.mask & allowed, antennas: self.antennas }
    }
}

/// Per-queue rates in packets per slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RateVector(Vec<f64>);

impl RateVector {
    /// Components must be finite and nonnegative. Departure vectors built by
    /// this crate are additionally at most one per component; arrival
    /// vectors may exceed that.
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::domain("rates must be finite and nonnegative"));
        }
        Ok(RateVector(rates))
    }

    pub fn zeros(n: usize) -> Self {
        RateVector(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        RateVector::new(self.0.iter().map(|r| r * s).collect())
    }

    /// Componentwise `self >= other - tol`.
    pub fn dominates(&self, other: &RateVector, tol: f64) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| *a >= b - tol)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for RateVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
