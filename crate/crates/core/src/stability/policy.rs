
use serde::Serialize;

use super::{DecisionVector, RateTable};
use crate::numerics::RngStream;
use crate::{Error, Result, MAX_ANTENNAS};

/// Distribution over the `2^L` decisions, indexed by decision bitmask.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryPolicy {
    antennas: usize,
    weights: Vec<f64>,
}

impl StationaryPolicy {
    pub fn new(antennas: usize, weights: Vec<f64>) -> Result<Self> {
        if antennas > MAX_ANTENNAS || weights.len() != 1 << antennas {
            return Err(Error::domain(format!("policy over {antennas} queues needs 2^{antennas} weights")));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::domain("policy weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("policy weights sum to {total}, not 1")));
        }
        Ok(StationaryPolicy { antennas, weights })
    }

    pub fn point_mass(decision: DecisionVector) -> Self {
        let mut weights = vec![0.0; 1 << decision.antennas()];
        weights[decision.mask() as usize] = 1.0;
        StationaryPolicy { antennas: decision.antennas(), weights }
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, decision: DecisionVector) -> f64 {
        self.weights[decision.mask() as usize]
    }

    /// Decisions with positive weight.
    pub fn support(&self) -> Vec<(DecisionVector, f64)> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(m, w)| (DecisionVector { mask: m as u32, antennas: self.antennas }, *w))
            .collect()
    }

    /// Draws one decision.
    pub fn sample(&self, rng: &mut RngStream) -> DecisionVector {
        let u = rng.uniform();
        let mut acc = 0.0;
        let mut last = 0;
        for (m, &w) in self.weights.iter().enumerate() {
            if w > 0.0 {
                acc += w;
                last = m;
                if u < acc {
                    break;
                }
            }
        }
        DecisionVector { mask: last as u32, antennas: self.antennas }
    }
}

/// Max-weight decision `argmax_v d(‖v‖₁) vᵀq` over subsets of the nonempty
/// queues.
///
/// Ties go to fewer scheduled queues, then to the lexicographically smallest
/// sorted index list. For a fixed count `k` the best subset is the `k`
/// longest queues (lower index first among equals), so the scan over all
/// `2^L` subsets reduces to one scan over `k`.
pub fn max_weight_decision(rates: &RateTable, q: &[u64]) -> Result<DecisionVector> {
    let l = rates.antennas();
    if q.len() != l {
        return Err(Error::domain(format!("expected {l} queue lengths, got {}", q.len())));
    }
    let mut order: Vec<usize> = (0..l).filter(|&i| q[i] > 0).collect();
    order.sort_by(|&a, &b| q[b].cmp(&q[a]).then(a.cmp(&b)));

    let mut best_k = 0;
    let mut best_w = 0.0;
    let mut sum = 0u64;
    for (k, &i) in order.iter().enumerate() {
        sum += q[i];
        let w = rates.get(k + 1) * sum as f64;
        if w > best_w {
            best_w = w;
            best_k = k + 1;
        }
    }
    let mask = order[..best_k].iter().fold(0u32, |m, &i| m | 1 << i);
    DecisionVector::from_mask(mask, l)
}

/// Reference implementation scanning every subset; kept for tests.
#[cfg(test)]
pub(crate) fn max_weight_exhaustive(rates: &RateTable, q: &[u64]) -> DecisionVector {
    let l = rates.antennas();
    let nonempty = (0..l).filter(|&i| q[i] > 0).fold(0u32, |m, i| m | 1 << i);
    let mut best = DecisionVector::empty(l);
    let mut best_w = 0.0;
    for mask in 0u32..1 << l {
        if mask & !nonempty != 0 {
            continue;
        }
        let v = DecisionVector::from_mask(mask, l).unwrap();
        let s: u64 = v.indices().iter().map(|&i| q[i]).sum();
        let w = rates.get(v.count()) * s as f64;
        let better = match w.partial_cmp(&best_w).unwrap() {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => {
                v.count() < best.count() || (v.count() == best.count() && v.indices() < best.indices())
            }
        };
        if better {
            best = v;
            best_w = w;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::SystemParams;
    use proptest::prelude::*;

    #[test]
    fn empty_queues_get_nothing() {
        let t = RateTable::new(&SystemParams::new(3, 10.0, 1.0).unwrap()).unwrap();
        assert!(max_weight_decision(&t, &[0, 0, 0]).unwrap().is_empty());
        assert!(max_weight_decision(&t, &[0, 0]).is_err());
    }

    #[test]
    fn two_queue_example() {
        // d(1) = 0.9, d(2) = 0.5, q = (10, 1): 9 > 5.5 > 0.9.
        let t = RateTable::from_rates(&[0.9, 0.5]).unwrap();
        assert_eq!(max_weight_decision(&t, &[10, 1]).unwrap().indices(), vec![0]);
    }

    #[test]
    fn equal_queues_take_lowest_indices() {
        // k d(k) = 0.9, 1.2, 0.9: best size 2, so queues {0, 1}.
        let t = RateTable::from_rates(&[0.9, 0.6, 0.3]).unwrap();
        assert_eq!(max_weight_decision(&t, &[5, 5, 5]).unwrap().indices(), vec![0, 1]);
        // Exact tie between one and two queues: fewer wins.
        let t = RateTable::from_rates(&[1.0, 0.5]).unwrap();
        assert_eq!(max_weight_decision(&t, &[4, 4]).unwrap().indices(), vec![0]);
    }

    #[test]
    fn policy_validation_and_sampling() {
        assert!(StationaryPolicy::new(2, vec![0.5, 0.5]).is_err());
        assert!(StationaryPolicy::new(1, vec![0.5, 0.6]).is_err());
        assert!(StationaryPolicy::new(1, vec![-0.5, 1.5]).is_err());
        let p = StationaryPolicy::new(2, vec![0.0, 0.25, 0.75, 0.0]).unwrap();
        assert_eq!(p.support().len(), 2);
        let mut rng = RngStream::new(41);
        let n = 40_000;
        let hits = (0..n).filter(|_| p.sample(&mut rng).mask() == 1).count();
        assert!((hits as f64 / n as f64 - 0.25).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn matches_exhaustive_scan(
            l in 1usize..=6,
            power in 0.1f64..50.0,
            q in proptest::collection::vec(0u64..6, 6),
        ) {
            let t = RateTable::new(&SystemParams::new(l, power, 1.0).unwrap()).unwrap();
            let q = &q[..l];
            prop_assert_eq!(max_weight_decision(&t, q).unwrap(), max_weight_exhaustive(&t, q));
        }

        #[test]
        fn permutation_equivariant(
            power in 0.1f64..50.0,
            q in proptest::collection::vec(0u64..1000, 4),
            shift in 0usize..4,
        ) {
            // Distinct lengths keep the argmax unique.
            let q: Vec<u64> = q.iter().enumerate().map(|(i, x)| x * 8 + i as u64).collect();
            let t = RateTable::new(&SystemParams::new(4, power, 1.0).unwrap()).unwrap();
            let rotated: Vec<u64> = (0..4).map(|i| q[(i + shift) % 4]).collect();
            let a = max_weight_decision(&t, &q).unwrap().indices();
            let b = max_weight_decision(&t, &rotated).unwrap().indices();
            let mut mapped: Vec<usize> = b.iter().map(|&i| (i + shift) % 4).collect();
            mapped.sort();
            prop_assert_eq!(a, mapped);
        }

        #[test]
        fn work_conserving(power in 0.1f64..50.0, q in proptest::collection::vec(0u64..5, 4)) {
            let t = RateTable::new(&SystemParams::new(4, power, 1.0).unwrap()).unwrap();
            let d = max_weight_decision(&t, &q).unwrap();
            if q.iter().any(|&x| x > 0) {
                prop_assert!(!d.is_empty());
            }
            for i in d.indices() {
                prop_assert!(q[i] > 0);
            }
        }
    }
}
