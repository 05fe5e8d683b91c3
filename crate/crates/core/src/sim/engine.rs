use std::collections::VecDeque;

use super::metrics::{DelaySummary, QueueMetrics, SimMetrics, StabilityVerdict, TraceRow};
use super::{streams, PolicyConfig, SimConfig};
use crate::channel::{evaluate_links, zf_beamformers, ChannelRealization, CsiQuantizer};
use crate::delay::ArrivalLaw;
use crate::numerics::stats::BatchEstimate;
use crate::numerics::RngStream;
use crate::stability::{max_weight_decision, DecisionVector, RateTable, StationaryPolicy};
use crate::{Error, Result};

const MAX_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy)]
struct Packet {
    arrival_slot: u64,
    attempts: u32,
}

enum Scheduler {
    MaxWeight(RateTable),
    Stationary(StationaryPolicy),
    Fixed(u32),
}

impl Scheduler {
    fn decide(&self, lengths: &[u64], rng: &mut RngStream) -> Result<DecisionVector> {
        let l = lengths.len();
        let nonempty = (0..l).filter(|&i| lengths[i] > 0).fold(0u32, |m, i| m | 1 << i);
        Ok(match self {
            Scheduler::MaxWeight(table) => max_weight_decision(table, lengths)?,
            Scheduler::Stationary(p) => p.sample(rng).masked(nonempty),
            Scheduler::Fixed(mask) => DecisionVector::from_mask(*mask, l)?.masked(nonempty),
        })
    }
}

/// Per-queue arrival process: renewal times in continuous time, each packet
/// entering the queue at the start of slot `⌈a⌉`.
struct ArrivalStream {
    law: Option<ArrivalLaw>,
    next: f64,
    rng: RngStream,
}

impl ArrivalStream {
    fn new(law: &ArrivalLaw, rng: RngStream) -> Self {
        let law = (law.rate() > 0.0).then(|| law.clone());
        let mut s = ArrivalStream { law, next: f64::INFINITY, rng };
        if let Some(law) = &s.law {
            s.next = law.sample(&mut s.rng);
        }
        s
    }

    /// Number of arrivals in `(slot − 1, slot]`, plus any at time zero for
    /// the first slot.
    fn count_until(&mut self, slot: u64) -> u64 {
        let Some(law) = &self.law else { return 0 };
        let mut n = 0;
        while self.next <= slot as f64 {
            n += 1;
            self.next += law.sample(&mut self.rng);
        }
        n
    }
}

/// Runs one simulation. Deterministic given the configuration.
pub fn run(config: &SimConfig) -> Result<SimMetrics> {
    config.validate()?;
    let params = config.params;
    let l = params.antennas;
    let horizon = config.horizon;
    let warmup = config.warmup_slots();
    let measured = horizon - warmup;
    let batches = config.batches as u64;
    let batch_len = measured / batches;

    let scheduler = match &config.policy {
        PolicyConfig::MaxWeight => Scheduler::MaxWeight(RateTable::new(&params)?),
        PolicyConfig::Stationary { weights } => Scheduler::Stationary(StationaryPolicy::new(l, weights.clone())?),
        PolicyConfig::Fixed { queues } => {
            Scheduler::Fixed(DecisionVector::from_indices(queues, l)?.mask())
        }
    };
    let quantizer = CsiQuantizer::new(config.csi, l)?;
    let seed = config.seed;
    let mut arrivals: Vec<ArrivalStream> = config
        .arrivals
        .iter()
        .enumerate()
        .map(|(i, law)| ArrivalStream::new(law, RngStream::derive(seed, streams::ARRIVALS, i as u64)))
        .collect();
    let mut channel_rng = RngStream::derive(seed, streams::CHANNEL, 0);
    let mut quant_rng = RngStream::derive(seed, streams::QUANTIZATION, 0);
    let mut policy_rng = RngStream::derive(seed, streams::POLICY, 0);

    let mut queues: Vec<VecDeque<Packet>> = vec![VecDeque::new(); l];
    let mut lengths = vec![0u64; l];
    let mut total_arrivals = 0u64;
    let mut total_departures = 0u64;
    let mut q_arrivals = vec![0u64; l];
    let mut q_departures = vec![0u64; l];
    let mut q_attempts = vec![0u64; l];
    let mut batch_sums = vec![vec![0.0f64; config.batches]; l + 1];
    let mut third_sums = [0.0f64; 3];
    let mut third_counts = [0u64; 3];
    let mut delays = Vec::new();
    let mut waiting = Vec::new();
    let mut max_delay = 0u64;
    let mut degenerate = 0u64;
    let mut trace = Vec::new();

    for t in 1..=horizon {
        let measuring = t > warmup;
        for (i, a) in arrivals.iter_mut().enumerate() {
            let n = a.count_until(t);
            for _ in 0..n {
                queues[i].push_back(Packet { arrival_slot: t, attempts: 0 });
            }
            lengths[i] += n;
            total_arrivals += n;
            if measuring {
                q_arrivals[i] += n;
            }
        }

        let decision = scheduler.decide(&lengths, &mut policy_rng)?;
        let mut departed = 0u32;
        if !decision.is_empty() {
            let scheduled = decision.indices();
            // All users report every slot so that the random streams stay
            // aligned across policies and CSI modes.
            let links = {
                let mut tries = 0;
                loop {
                    let chans = ChannelRealization::sample(l, l, &mut channel_rng);
                    let mut csi = Vec::with_capacity(l);
                    for h in &chans.users {
                        csi.push(quantizer.quantize(h, &mut quant_rng)?.direction);
                    }
                    let sched_csi: Vec<_> = scheduled.iter().map(|&i| csi[i].clone()).collect();
                    match zf_beamformers(&scheduled, &sched_csi, params.power) {
                        Ok(beams) => {
                            let sched_h: Vec<_> = scheduled.iter().map(|&i| chans.users[i].clone()).collect();
                            break evaluate_links(&sched_h, &beams, params.theta);
                        }
                        Err(Error::DegenerateGeometry(_)) if tries < MAX_RESAMPLES => {
                            tries += 1;
                            degenerate += 1;
                        }
                        Err(e) => return Err(e),
                    }
                }
            };
            for link in links {
                let i = link.user;
                let head = queues[i].front_mut().expect("scheduled queues are nonempty");
                head.attempts += 1;
                if measuring {
                    q_attempts[i] += 1;
                }
                if link.success {
                    let p = queues[i].pop_front().expect("nonempty");
                    lengths[i] -= 1;
                    total_departures += 1;
                    departed |= 1 << i;
                    if measuring {
                        q_departures[i] += 1;
                    }
                    if p.arrival_slot > warmup {
                        let d = t - p.arrival_slot + 1;
                        max_delay = max_delay.max(d);
                        delays.push(d as u32);
                        waiting.push((d - p.attempts as u64) as u32);
                    }
                }
            }
        }

        let total: u64 = lengths.iter().sum();
        let third = ((t - 1) * 3 / horizon) as usize;
        third_sums[third] += total as f64;
        third_counts[third] += 1;
        if measuring && batch_len > 0 {
            let b = ((t - warmup - 1) / batch_len).min(batches - 1) as usize;
            for i in 0..l {
                batch_sums[i][b] += lengths[i] as f64;
            }
            batch_sums[l][b] += total as f64;
        }
        if config.trace {
            trace.push(TraceRow { slot: t, queues: lengths.clone(), decision: decision.mask(), departures: departed });
        }
    }

    let batch_estimate = |sums: &[f64]| {
        let sizes: Vec<u64> = (0..batches)
            .map(|b| if b == batches - 1 { measured - batch_len * (batches - 1) } else { batch_len })
            .collect();
        let means: Vec<f64> = sums.iter().zip(&sizes).map(|(s, &n)| s / n as f64).collect();
        let mut est = BatchEstimate::from_batch_means(&means);
        est.mean = sums.iter().sum::<f64>() / measured as f64;
        est
    };
    let queue_metrics = (0..l)
        .map(|i| QueueMetrics {
            arrivals: q_arrivals[i],
            departures: q_departures[i],
            attempts: q_attempts[i],
            departure_rate: q_departures[i] as f64 / measured as f64,
            success_rate: if q_attempts[i] > 0 { q_departures[i] as f64 / q_attempts[i] as f64 } else { 0.0 },
            mean_length: batch_estimate(&batch_sums[i]),
        })
        .collect();
    let mean = |v: &[u32]| if v.is_empty() { 0.0 } else { v.iter().map(|&x| x as f64).sum::<f64>() / v.len() as f64 };
    let third_mean = |k: usize| if third_counts[k] > 0 { third_sums[k] / third_counts[k] as f64 } else { 0.0 };
    let offered_per_third = config.total_arrival_rate() * horizon as f64 / 3.0;
    let final_backlog: u64 = lengths.iter().sum();

    Ok(SimMetrics {
        horizon,
        warmup,
        total_arrivals,
        total_departures,
        final_backlog,
        queues: queue_metrics,
        mean_total_length: batch_estimate(&batch_sums[l]),
        delay: DelaySummary {
            packets: delays.len() as u64,
            mean_delay: mean(&delays),
            mean_waiting: mean(&waiting),
            max_delay,
        },
        stability: StabilityVerdict::from_thirds(third_mean(1), third_mean(2), offered_per_third),
        degenerate_slots: degenerate,
        delays,
        waiting,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::CsiMode;
    use crate::delay::pk_average_delay;
    use crate::sim::Verdict;
    use crate::stability::SystemParams;
    use proptest::prelude::*;

    fn single(theta_over_p: f64, lambda: f64, horizon: u64, seed: u64) -> SimConfig {
        let mut c = SimConfig::poisson(SystemParams::new(1, 1.0, theta_over_p).unwrap(), &[lambda], horizon, seed);
        c.policy = PolicyConfig::Fixed { queues: vec![0] };
        c
    }

    #[test]
    fn no_arrivals_no_activity() {
        let c = SimConfig::poisson(SystemParams::new(3, 10.0, 1.0).unwrap(), &[0.0; 3], 5000, 1);
        let m = run(&c).unwrap();
        assert_eq!(m.total_arrivals, 0);
        assert_eq!(m.total_departures, 0);
        assert_eq!(m.mean_total_length.mean, 0.0);
        assert_eq!(m.delay.packets, 0);
        assert_eq!(m.stability.verdict, Verdict::Stable);
    }

    #[test]
    fn single_queue_delay_matches_pk() {
        // μ = e^{−θ/P} = 0.8.
        let theta = -(0.8f64).ln();
        let m = run(&single(theta, 0.4, 400_000, 3)).unwrap();
        let w = pk_average_delay(0.4, 0.8).unwrap();
        assert!((m.delay.mean_waiting - w).abs() / w < 0.05, "{} vs {w}", m.delay.mean_waiting);
        assert!((m.queues[0].success_rate - 0.8).abs() < 0.01);
        assert!(m.delay.mean_delay >= 1.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let mut c = SimConfig::poisson(SystemParams::new(3, 10.0, 1.0).unwrap(), &[0.2, 0.3, 0.1], 3000, 9);
        c.csi = CsiMode::SphereCap { bits: 6 };
        c.trace = true;
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert_eq!(a, b);
        c.seed = 10;
        assert_ne!(run(&c).unwrap().trace, a.trace);
    }

    #[test]
    fn trace_export() {
        let mut c = single(0.1, 0.3, 50, 4);
        c.trace = true;
        c.batches = 5;
        let m = run(&c).unwrap();
        let mut out = Vec::new();
        m.write_trace_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("slot,q_1,decision,departures\n"));
        assert_eq!(text.lines().count(), 51);
    }

    #[test]
    fn overload_is_unstable() {
        let m = run(&single(-(0.5f64).ln(), 0.7, 60_000, 5)).unwrap();
        assert_eq!(m.stability.verdict, Verdict::Unstable);
    }

    #[test]
    fn stationary_policy_runs() {
        let p = SystemParams::new(2, 10.0, 1.0).unwrap();
        let mut c = SimConfig::poisson(p, &[0.2, 0.2], 20_000, 6);
        c.policy = PolicyConfig::Stationary { weights: vec![0.0, 0.5, 0.5, 0.0] };
        let m = run(&c).unwrap();
        assert!(m.is_conserved());
        assert_eq!(m.stability.verdict, Verdict::Stable);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn conservation_and_work_conservation(seed in any::<u64>(), l in 1usize..=4, load in 0.05f64..1.5, bits in 2u32..10) {
            let p = SystemParams::new(l, 8.0, 1.0).unwrap();
            let rates: Vec<f64> = (0..l).map(|i| load * (i + 1) as f64 / (l * l) as f64).collect();
            let mut c = SimConfig::poisson(p, &rates, 2000, seed);
            if l > 1 {
                c.csi = CsiMode::SphereCap { bits };
            }
            c.trace = true;
            let m = run(&c).unwrap();
            prop_assert!(m.is_conserved());
            for (prev, row) in m.trace.iter().zip(m.trace.iter().skip(1)) {
                if prev.queues.iter().any(|&q| q > 0) {
                    prop_assert!(row.decision != 0);
                }
            }
            for row in &m.trace {
                prop_assert_eq!(row.departures & !row.decision, 0);
            }
            prop_assert!(m.delays.iter().all(|&d| d >= 1));
            for q in &m.queues {
                prop_assert!((0.0..=1.0).contains(&q.departure_rate));
            }
        }
    }
}
