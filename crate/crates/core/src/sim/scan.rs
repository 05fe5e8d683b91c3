use rayon::prelude::*;
use serde::Serialize;

use super::metrics::{StabilityVerdict, Verdict};
use super::{run, streams, SimConfig};
use crate::channel::CsiMode;
use crate::delay::ArrivalLaw;
use crate::numerics::stats::BatchEstimate;
use crate::numerics::RngStream;
use crate::stability::{stability_polytope, RateVector};
use crate::Result;
use rand::RngCore;

/// Relative distance to the analytic boundary under which a point is
/// reported inconclusive without judging the simulation.
const BOUNDARY_BAND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub scale: f64,
    pub arrival_rates: Vec<f64>,
    pub stability: StabilityVerdict,
    pub mean_total_length: BatchEstimate,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub direction: Vec<f64>,
    /// Largest stable scale of the perfect-CSI region.
    pub analytic_boundary: f64,
    /// Midpoint between the largest stable scale below the first unstable
    /// one and that unstable scale.
    pub empirical_boundary: Option<f64>,
    pub points: Vec<ScanPoint>,
}

fn point_seed(seed: u64, index: u64) -> u64 {
    RngStream::derive(seed, streams::SCAN, index).next_u64()
}

fn with_rates(config: &SimConfig, rates: &[f64], seed: u64) -> SimConfig {
    let mut c = config.clone();
    c.arrivals = rates.iter().map(|&rate| ArrivalLaw::Exponential { rate }).collect();
    c.seed = seed;
    c.trace = false;
    c
}

/// Runs the configured policy with Poisson arrivals `s·direction` for every
/// `s` in `scales`, one independent run per scale.
pub fn stability_scan(config: &SimConfig, direction: &RateVector, scales: &[f64]) -> Result<ScanReport> {
    let polytope = stability_polytope(&config.params)?;
    let analytic_boundary = polytope.boundary_scale(direction)?;
    let points = scales
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let rates = direction.scaled(s)?.into_vec();
            let seed = point_seed(config.seed, i as u64);
            let metrics = run(&with_rates(config, &rates, seed))?;
            let mut stability = metrics.stability;
            if ((s - analytic_boundary) / analytic_boundary).abs() < BOUNDARY_BAND {
                stability.verdict = Verdict::Inconclusive;
            }
            Ok(ScanPoint { scale: s, arrival_rates: rates, stability, mean_total_length: metrics.mean_total_length, seed })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<&ScanPoint> = points.iter().collect();
    order.sort_by(|a, b| a.scale.total_cmp(&b.scale));
    let empirical_boundary = order.iter().position(|p| p.stability.verdict == Verdict::Unstable).and_then(|u| {
        order[..u]
            .iter()
            .rev()
            .find(|p| p.stability.verdict == Verdict::Stable)
            .map(|p| 0.5 * (p.scale + order[u].scale))
    });
    Ok(ScanReport { direction: direction.as_slice().to_vec(), analytic_boundary, empirical_boundary, points })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub csi: CsiMode,
    pub scale: f64,
    pub total_arrival_rate: f64,
    pub mean_total_length: BatchEstimate,
    pub mean_delay: f64,
    pub verdict: Verdict,
    pub seed: u64,
}

/// Grid of runs over arrival scales and CSI modes. Every CSI mode at a given
/// scale shares the seed of that scale, so channel draws, arrivals and
/// quantizer randomness are common across modes.
pub fn sweep(config: &SimConfig, scales: &[f64], modes: &[CsiMode]) -> Result<Vec<SweepPoint>> {
    let grid: Vec<(usize, f64, CsiMode)> = scales
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| modes.iter().map(move |&m| (i, s, m)))
        .collect();
    grid.par_iter()
        .map(|&(i, s, csi)| {
            let seed = point_seed(config.seed, i as u64);
            let mut c = config.scaled_arrivals(s);
            c.csi = csi;
            c.seed = seed;
            c.trace = false;
            let m = run(&c)?;
            Ok(SweepPoint {
                csi,
                scale: s,
                total_arrival_rate: c.total_arrival_rate(),
                mean_total_length: m.mean_total_length,
                mean_delay: m.delay.mean_delay,
                verdict: m.stability.verdict,
                seed,
            })
        })
        .collect()
}
