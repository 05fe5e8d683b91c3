use serde::{Deserialize, Serialize};

use crate::channel::CsiMode;
use crate::delay::ArrivalLaw;
use crate::stability::{StationaryPolicy, SystemParams};
use crate::{Error, Result};

/// Scheduling rule applied every slot. Whatever the rule, empty queues are
/// never scheduled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyConfig {
    /// Max-weight with the perfect-CSI departure rates of the system.
    MaxWeight,
    /// Randomized time sharing, one weight per decision bitmask.
    Stationary { weights: Vec<f64> },
    /// Always the same queues.
    Fixed { queues: Vec<usize> },
}

fn default_batches() -> usize {
    20
}

/// Full description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub params: SystemParams,
    #[serde(default = "default_csi")]
    pub csi: CsiMode,
    /// One inter-arrival law per queue. Exponential laws with rate 0 mean
    /// no arrivals.
    pub arrivals: Vec<ArrivalLaw>,
    pub policy: PolicyConfig,
    pub horizon: u64,
    /// Defaults to a tenth of the horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    /// Batches for the batch-means standard errors.
    #[serde(default = "default_batches")]
    pub batches: usize,
    /// Keep a per-slot trace.
    #[serde(default)]
    pub trace: bool,
}

fn default_csi() -> CsiMode {
    CsiMode::Perfect
}

impl SimConfig {
    /// Poisson arrivals with the given per-queue rates and max-weight
    /// scheduling under perfect CSI.
    pub fn poisson(params: SystemParams, rates: &[f64], horizon: u64, seed: u64) -> Self {
        SimConfig {
            params,
            csi: CsiMode::Perfect,
            arrivals: rates.iter().map(|&rate| ArrivalLaw::Exponential { rate }).collect(),
            policy: PolicyConfig::MaxWeight,
            horizon,
            warmup: None,
            seed,
            batches: default_batches(),
            trace: false,
        }
    }

    pub fn warmup_slots(&self) -> u64 {
        self.warmup.unwrap_or(self.horizon / 10)
    }

    /// Total offered load in packets per slot.
    pub fn total_arrival_rate(&self) -> f64 {
        self.arrivals.iter().map(ArrivalLaw::rate).sum()
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let l = self.params.antennas;
        if self.arrivals.len() != l {
            return Err(Error::Config(format!(
                "{} arrival laws given for {l} queues",
                self.arrivals.len()
            )));
        }
        for law in &self.arrivals {
            if !matches!(law, ArrivalLaw::Exponential { rate } if *rate == 0.0) {
                law.validate().map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        if self.horizon == 0 || self.warmup_slots() >= self.horizon {
            return Err(Error::Config("horizon must exceed warmup".into()));
        }
        if self.batches == 0 || self.batches as u64 > self.horizon - self.warmup_slots() {
            return Err(Error::Config("batch count must be between 1 and the measured slots".into()));
        }
        match &self.policy {
            PolicyConfig::MaxWeight => {}
            PolicyConfig::Stationary { weights } => {
                StationaryPolicy::new(l, weights.clone()).map_err(|e| Error::Config(e.to_string()))?;
            }
            PolicyConfig::Fixed { queues } => {
                if queues.iter().any(|&q| q >= l) {
                    return Err(Error::Config("fixed decision names a queue out of range".into()));
                }
            }
        }
        if let Some(bits) = self.csi.bits() {
            if bits == 0 {
                return Err(Error::Config("feedback bits must be at least 1".into()));
            }
            if l < 2 {
                return Err(Error::Config("quantized CSI needs at least two antennas".into()));
            }
        }
        Ok(())
    }

    /// Same configuration with every arrival rate multiplied by `s`.
    pub fn scaled_arrivals(&self, s: f64) -> Self {
        let mut c = self.clone();
        c.arrivals = self.arrivals.iter().map(|law| scale_law(law, s)).collect();
        c
    }
}

fn scale_law(law: &ArrivalLaw, s: f64) -> ArrivalLaw {
    match law {
        ArrivalLaw::Exponential { rate } => ArrivalLaw::Exponential { rate: rate * s },
        ArrivalLaw::Deterministic { period } => ArrivalLaw::Deterministic { period: period / s },
        ArrivalLaw::Empirical { samples } => {
            ArrivalLaw::Empirical { samples: samples.iter().map(|x| x / s).collect() }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> SimConfig {
        SimConfig::poisson(SystemParams::new(2, 10.0, 1.0).unwrap(), &[0.1, 0.2], 1000, 7)
    }

    #[test]
    fn defaults_and_rates() {
        let c = base();
        assert_eq!(c.warmup_slots(), 100);
        assert!((c.total_arrival_rate() - 0.3).abs() < 1e-15);
        assert!((c.scaled_arrivals(2.0).total_arrival_rate() - 0.6).abs() < 1e-15);
        c.validate().unwrap();
    }

    #[test]
    fn validation_errors() {
        let mut c = base();
        c.arrivals.pop();
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = base();
        c.warmup = Some(1000);
        assert!(c.validate().is_err());
        let mut c = base();
        c.policy = PolicyConfig::Fixed { queues: vec![2] };
        assert!(c.validate().is_err());
        let mut c = base();
        c.policy = PolicyConfig::Stationary { weights: vec![0.5, 0.5] };
        assert!(c.validate().is_err());
        let mut c = base();
        c.csi = CsiMode::SphereCap { bits: 0 };
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_rejects_unknown_keys() {
        let json = r#"{
            "params": {"antennas": 1, "power": 5.0, "theta": 1.0},
            "arrivals": [{"law": "exponential", "rate": 0.4}],
            "policy": {"policy": "fixed", "queues": [0]},
            "horizon": 100
        }"#;
        let c: SimConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.csi, CsiMode::Perfect);
        assert_eq!(c.batches, 20);
        let bad = json.replace("\"horizon\"", "\"horizn\"");
        assert!(serde_json::from_str::<SimConfig>(&bad).is_err());
    }
}
