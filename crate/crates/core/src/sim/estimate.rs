use serde::Serialize;

use super::streams;
use crate::channel::{transmit_slot, CsiMode, CsiQuantizer};
use crate::numerics::RngStream;
use crate::stability::{departure_rate, SystemParams};
use crate::{Error, Result};

/// Monte-Carlo estimate of the per-queue departure rate with `k` queues
/// scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepartureEstimate {
    pub k: usize,
    pub estimate: f64,
    /// Binomial standard error.
    pub std_error: f64,
    pub slots: u64,
    /// Perfect-CSI value `d(k)`.
    pub analytic: f64,
    pub degenerate_slots: u64,
}

/// Estimates `Pr(SINR >= θ | K = k)` from `slots` independent slots. One
/// tagged user is observed per slot so the estimate is an average of
/// i.i.d. Bernoulli outcomes.
pub fn estimate_departure_rate(
    params: &SystemParams,
    k: usize,
    csi: CsiMode,
    slots: u64,
    seed: u64,
) -> Result<DepartureEstimate> {
    let analytic = departure_rate(params, k)?.get();
    if slots == 0 {
        return Err(Error::domain("need at least one slot"));
    }
    let quantizer = CsiQuantizer::new(csi, params.antennas)?;
    let scheduled: Vec<usize> = (0..k).collect();
    let mut chan = RngStream::derive(seed, streams::ESTIMATE, 2 * k as u64);
    let mut quant = RngStream::derive(seed, streams::ESTIMATE, 2 * k as u64 + 1);
    let mut hits = 0u64;
    let mut degenerate = 0u64;
    let mut done = 0u64;
    while done < slots {
        match transmit_slot(params.antennas, &scheduled, params.power, params.theta, &quantizer, &mut chan, &mut quant) {
            Ok(links) => {
                hits += links[0].success as u64;
                done += 1;
            }
            Err(Error::DegenerateGeometry(_)) => degenerate += 1,
            Err(e) => return Err(e),
        }
    }
    let p = hits as f64 / slots as f64;
    Ok(DepartureEstimate {
        k,
        estimate: p,
        std_error: (p * (1.0 - p) / slots as f64).sqrt(),
        slots,
        analytic,
        degenerate_slots: degenerate,
    })
}
