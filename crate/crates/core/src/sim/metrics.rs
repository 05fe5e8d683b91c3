use std::io::Write;

use serde::Serialize;

use crate::numerics::stats::BatchEstimate;
use crate::Result;

/// Outcome of the fluid-scaling stability heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

/// Mean total backlog over the middle and last thirds of the horizon and the
/// verdict derived from them.
///
/// `drift_fraction` is the backlog increase between the two thirds as a
/// fraction of the packets offered during one third; a persistent excess
/// load `ε` drives it to about `ε/Λ`. The run is *unstable* when the backlog
/// grew by at least 20% and the drift fraction is at least 0.02, *stable*
/// when the drift fraction is below 0.005, and inconclusive otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub verdict: Verdict,
    pub middle_third_mean: f64,
    pub last_third_mean: f64,
    pub relative_growth: f64,
    pub drift_fraction: f64,
}

pub(crate) const UNSTABLE_GROWTH: f64 = 0.20;
pub(crate) const UNSTABLE_DRIFT: f64 = 0.02;
pub(crate) const STABLE_DRIFT: f64 = 0.005;

impl StabilityVerdict {
    pub(crate) fn from_thirds(middle: f64, last: f64, offered_per_third: f64) -> Self {
        let relative_growth = if middle > 0.0 {
            last / middle - 1.0
        } else if last > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        let drift_fraction = if offered_per_third > 0.0 { (last - middle) / offered_per_third } else { 0.0 };
        let verdict = if relative_growth >= UNSTABLE_GROWTH && drift_fraction >= UNSTABLE_DRIFT {
            Verdict::Unstable
        } else if drift_fraction < STABLE_DRIFT {
            Verdict::Stable
        } else {
            Verdict::Inconclusive
        };
        StabilityVerdict {
            verdict,
            middle_third_mean: middle,
            last_third_mean: last,
            relative_growth,
            drift_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueueMetrics {
    pub arrivals: u64,
    pub departures: u64,
    /// Transmissions of this queue's head packet.
    pub attempts: u64,
    /// Departures per measured slot.
    pub departure_rate: f64,
    /// Departures per attempt.
    pub success_rate: f64,
    pub mean_length: BatchEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelaySummary {
    pub packets: u64,
    /// Departure slot − arrival slot + 1.
    pub mean_delay: f64,
    /// Delay minus the slots spent in transmission.
    pub mean_waiting: f64,
    pub max_delay: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CcdfPoint {
    pub t: u64,
    pub ccdf: f64,
    /// Batch-means standard error of `ccdf`.
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub slot: u64,
    pub queues: Vec<u64>,
    pub decision: u32,
    pub departures: u32,
}

/// Everything measured by one run. Counters cover the whole run; rates,
/// lengths and delays cover the slots after warmup (delays: packets that
/// arrived after warmup and left before the horizon).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimMetrics {
    pub horizon: u64,
    pub warmup: u64,
    pub total_arrivals: u64,
    pub total_departures: u64,
    pub final_backlog: u64,
    pub queues: Vec<QueueMetrics>,
    pub mean_total_length: BatchEstimate,
    pub delay: DelaySummary,
    pub stability: StabilityVerdict,
    /// Slots whose CSI set was rank deficient and had to be redrawn.
    pub degenerate_slots: u64,
    #[serde(skip)]
    pub delays: Vec<u32>,
    #[serde(skip)]
    pub waiting: Vec<u32>,
    #[serde(skip)]
    pub trace: Vec<TraceRow>,
}

fn ccdf_points(samples: &[u32], ts: &[u64], batches: usize) -> Vec<CcdfPoint> {
    let n = samples.len();
    let batches = batches.clamp(1, n.max(1));
    let size = n / batches;
    ts.iter()
        .map(|&t| {
            let hits = samples.iter().filter(|&&x| x as u64 >= t).count();
            let ccdf = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
            let std_error = if size == 0 || batches < 2 {
                f64::NAN
            } else {
                let means: Vec<f64> = samples
                    .chunks_exact(size)
                    .take(batches)
                    .map(|c| c.iter().filter(|&&x| x as u64 >= t).count() as f64 / size as f64)
                    .collect();
                BatchEstimate::from_batch_means(&means).std_error
            };
            CcdfPoint { t, ccdf, std_error }
        })
        .collect()
}

impl SimMetrics {
    /// `Pr(delay >= t)` over the recorded packets.
    pub fn delay_ccdf(&self, ts: &[u64], batches: usize) -> Vec<CcdfPoint> {
        ccdf_points(&self.delays, ts, batches)
    }

    /// `Pr(waiting >= t)` over the recorded packets.
    pub fn waiting_ccdf(&self, ts: &[u64], batches: usize) -> Vec<CcdfPoint> {
        ccdf_points(&self.waiting, ts, batches)
    }

    /// `arrivals − departures = final backlog`.
    pub fn is_conserved(&self) -> bool {
        self.total_arrivals == self.total_departures + self.final_backlog
    }

    /// Writes the slot trace as CSV: `slot,q_1..q_L,decision,departures`.
    pub fn write_trace_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let l = self.queues.len();
        let mut header = vec!["slot".to_string()];
        header.extend((1..=l).map(|i| format!("q_{i}")));
        header.push("decision".into());
        header.push("departures".into());
        writeln!(w, "{}", header.join(","))?;
        for row in &self.trace {
            let qs: Vec<String> = row.queues.iter().map(|q| q.to_string()).collect();
            writeln!(w, "{},{},{},{}", row.slot, qs.join(","), row.decision, row.departures)?;
        }
        Ok(())
    }
}
