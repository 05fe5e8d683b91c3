use rand::RngCore;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::output::{num, Document, Table};
use super::{
    overlay, read_config, BitsCommand, Cli, Command, DelayRatioArgs, DeltaArgs, DrateArgs, EtaArgs, KingmanArgs,
    LawArg, RegionArgs, SimulateArgs,
};
use crate::channel::CsiMode;
use crate::delay::{
    bits_for_delay_ratio, bits_for_delay_ratio_asymptotic, bits_for_eta, ccdf_bound_curve, delay_ratio_curve,
    delta_for_delay_ratio, feedback_bits_for_delta, kingman_analysis, kingman_exponent, ArrivalLaw, BudgetReport,
    DeltaVariant,
};
use crate::numerics::RngStream;
use crate::sim::{estimate_departure_rate, run, streams, sweep, SimConfig};
use crate::stability::{power_region_sample, stability_polytope, SystemParams};
use crate::{Error, Result};

pub(super) fn dispatch(cli: &Cli) -> Result<Document> {
    if let Command::Simulate(args) = &cli.command {
        return simulate(cli, args);
    }
    let overrides = match &cli.config {
        Some(path) => Some(serde_json::from_str::<Value>(&read_config(path)?).map_err(|e| Error::Config(e.to_string()))?),
        None => None,
    };
    let o = overrides.as_ref();
    match &cli.command {
        Command::Region(a) => region(&overlay(a, o)?),
        Command::Drate(a) => drate(&overlay(a, o)?, cli.seed.unwrap_or(0)),
        Command::Bits(BitsCommand::Delta(a)) => bits_delta(&overlay(a, o)?),
        Command::Bits(BitsCommand::DelayRatio(a)) => bits_delay_ratio(&overlay(a, o)?),
        Command::Bits(BitsCommand::Eta(a)) => bits_eta(&overlay(a, o)?),
        Command::Kingman(a) => kingman(&overlay(a, o)?),
        Command::Simulate(_) => unreachable!("handled above"),
    }
}

fn doc(command: &str, config: Value, result: Value, table: Option<Table>) -> Document {
    Document { command: command.into(), config, result, table }
}

fn region(a: &RegionArgs) -> Result<Document> {
    let params = a.link.params()?;
    let poly = stability_polytope(&params)?;
    let l = params.antennas;
    let mut header = vec!["kind".to_string(), "k".to_string()];
    header.extend((1..=l).map(|i| format!("x_{i}")));
    let mut table = Table::new(header);
    for v in &poly.vertices {
        let mut row = vec!["vertex".to_string(), v.decision.count().to_string()];
        row.extend(v.point.as_slice().iter().map(|&x| num(x)));
        table.push(row);
    }
    let mut result = poly.to_json();
    if a.power_control {
        let cloud = power_region_sample(&params, a.grid)?;
        for p in &cloud {
            let k = p.as_slice().iter().filter(|&&x| x > 0.0).count();
            let mut row = vec!["power_control".to_string(), k.to_string()];
            row.extend(p.as_slice().iter().map(|&x| num(x)));
            table.push(row);
        }
        result["power_region"] = json!(cloud.iter().map(|p| p.as_slice().to_vec()).collect::<Vec<_>>());
    }
    Ok(doc("region", serde_json::to_value(a)?, result, Some(table)))
}

fn drate(a: &DrateArgs, seed: u64) -> Result<Document> {
    if a.slots == 0 {
        return Err(Error::Config("slots must be positive".into()));
    }
    let power = a.power_unit.to_linear(a.power);
    let mut jobs = Vec::new();
    for &l in &a.antennas {
        let params = SystemParams::new(l, power, a.theta)?;
        let csi = if a.perfect {
            CsiMode::Perfect
        } else {
            let bits = match a.bits {
                Some(b) => b,
                None => feedback_bits_for_delta(&params, a.delta)?.bits,
            };
            CsiMode::SphereCap { bits }
        };
        let l_seed = RngStream::derive(seed, streams::ESTIMATE, 1 << 32 | l as u64).next_u64();
        jobs.extend((1..=l).map(|k| (params, k, csi, l_seed)));
    }
    let rows = jobs
        .par_iter()
        .map(|&(params, k, csi, s)| estimate_departure_rate(&params, k, csi, a.slots, s).map(|e| (params, csi, e)))
        .collect::<Result<Vec<_>>>()?;

    let mut table = Table::new(["antennas", "k", "bits", "d", "d_hat", "std_error", "d_ref"]);
    let mut out = Vec::new();
    for (params, csi, e) in rows {
        let bits = csi.bits().map_or("perfect".to_string(), |b| b.to_string());
        let d_ref = (1.0 - a.delta) * e.analytic;
        table.push(vec![
            params.antennas.to_string(),
            e.k.to_string(),
            bits.clone(),
            num(e.analytic),
            num(e.estimate),
            num(e.std_error),
            num(d_ref),
        ]);
        out.push(json!({
            "antennas": params.antennas, "k": e.k, "bits": csi.bits(), "d": e.analytic,
            "d_hat": e.estimate, "std_error": e.std_error, "d_ref": d_ref, "slots": e.slots,
        }));
    }
    let mut config = serde_json::to_value(a)?;
    config["seed"] = json!(seed);
    Ok(doc("drate", config, json!(out), Some(table)))
}

fn budget_table(r: &BudgetReport) -> Table {
    let mut t = Table::new(["bits_real", "bits"]);
    t.push(vec![num(r.bits_real), r.bits.to_string()]);
    t
}

fn bits_delta(a: &DeltaArgs) -> Result<Document> {
    let b = feedback_bits_for_delta(&a.link.params()?, a.delta)?;
    let inputs = serde_json::to_value(a)?;
    let report = BudgetReport { inputs: inputs.clone(), bits_real: b.bits_real, bits: b.bits, variant: None, bound_curve: vec![] };
    let mut result = serde_json::to_value(&report)?;
    result["kappa"] = json!(b.kappa);
    Ok(doc("bits delta", inputs, result, Some(budget_table(&report))))
}

fn bits_delay_ratio(a: &DelayRatioArgs) -> Result<Document> {
    let params = a.link.params()?;
    let variant: DeltaVariant = a.variant.into();
    if a.curve_from > a.curve_to {
        return Err(Error::Config("curve_from must not exceed curve_to".into()));
    }
    let b = bits_for_delay_ratio(&params, a.m, a.tau, variant)?;
    let inputs = serde_json::to_value(a)?;
    let report = BudgetReport {
        inputs: inputs.clone(),
        bits_real: b.bits_real,
        bits: b.bits,
        variant: Some(variant),
        bound_curve: vec![],
    };
    let grid: Vec<f64> = (a.curve_from..=a.curve_to).map(f64::from).collect();
    let curve = delay_ratio_curve(&params, a.tau, variant, &grid)?;
    let mut table = Table::new(["bits", "m_exact", "m_asymptotic", "m_asymptotic_full"]);
    for p in &curve {
        table.push(vec![num(p.bits), num(p.m_exact), num(p.m_asymptotic), num(p.m_asymptotic_full)]);
    }
    let mut result = serde_json::to_value(&report)?;
    result["delta"] = json!(delta_for_delay_ratio(a.m, a.tau, variant)?);
    result["asymptotic_bits"] = serde_json::to_value(bits_for_delay_ratio_asymptotic(&params, a.m, a.tau)?)?;
    result["curve"] = serde_json::to_value(&curve)?;
    Ok(doc("bits delay-ratio", inputs, result, Some(table)))
}

fn bits_eta(a: &EtaArgs) -> Result<Document> {
    let b = bits_for_eta(&a.link.params()?, a.eta)?;
    let bound_curve = match (a.lambda, a.mu) {
        (Some(lambda), Some(mu)) => {
            let r = kingman_exponent(&ArrivalLaw::Exponential { rate: lambda }, mu)?;
            let ts: Vec<f64> = (0..=a.t_max).map(f64::from).collect();
            ccdf_bound_curve(r, a.eta, &ts)
        }
        _ => vec![],
    };
    let inputs = serde_json::to_value(a)?;
    let report = BudgetReport { inputs: inputs.clone(), bits_real: b.bits_real, bits: b.bits, variant: None, bound_curve };
    let table = if report.bound_curve.is_empty() {
        budget_table(&report)
    } else {
        let mut t = Table::new(["t", "bound"]);
        for &(x, y) in &report.bound_curve {
            t.push(vec![num(x), num(y)]);
        }
        t
    };
    Ok(doc("bits eta", inputs, serde_json::to_value(&report)?, Some(table)))
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<Document> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("simulate needs --config <file>".into()))?;
    let mut config: SimConfig =
        serde_json::from_str(&read_config(path)?).map_err(|e| Error::Config(e.to_string()))?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let mut resolved = serde_json::to_value(&config)?;
    resolved["sweep"] = serde_json::to_value(a)?;

    if a.scales.is_empty() {
        if !a.bits.is_empty() || a.perfect {
            return Err(Error::Config("--bits and --perfect need --scales".into()));
        }
        config.trace = a.trace.is_some();
        let m = run(&config)?;
        if let Some(p) = &a.trace {
            let file = std::fs::File::create(p)?;
            m.write_trace_csv(std::io::BufWriter::new(file))?;
        }
        let mut table = Table::new(["queue", "arrivals", "departures", "departure_rate", "mean_length", "mean_length_se"]);
        for (i, q) in m.queues.iter().enumerate() {
            table.push(vec![
                (i + 1).to_string(),
                q.arrivals.to_string(),
                q.departures.to_string(),
                num(q.departure_rate),
                num(q.mean_length.mean),
                num(q.mean_length.std_error),
            ]);
        }
        return Ok(doc("simulate", resolved, serde_json::to_value(&m)?, Some(table)));
    }

    if a.trace.is_some() {
        return Err(Error::Config("--trace applies to single runs only".into()));
    }
    let mut modes: Vec<CsiMode> = a.bits.iter().map(|&bits| CsiMode::SphereCap { bits }).collect();
    if a.perfect {
        modes.push(CsiMode::Perfect);
    }
    if modes.is_empty() {
        modes.push(config.csi);
    }
    let points = sweep(&config, &a.scales, &modes)?;
    let mut table = Table::new(["csi", "scale", "total_arrival_rate", "mean_total_length", "std_error", "mean_delay", "verdict"]);
    for p in &points {
        table.push(vec![
            p.csi.bits().map_or("perfect".to_string(), |b| format!("B{b}")),
            num(p.scale),
            num(p.total_arrival_rate),
            num(p.mean_total_length.mean),
            num(p.mean_total_length.std_error),
            num(p.mean_delay),
            serde_json::to_value(p.verdict)?.as_str().unwrap_or_default().to_string(),
        ]);
    }
    Ok(doc("simulate sweep", resolved, serde_json::to_value(&points)?, Some(table)))
}

fn kingman(a: &KingmanArgs) -> Result<Document> {
    if !(a.lambda > 0.0) {
        return Err(Error::Config("lambda must be positive".into()));
    }
    let law = match a.law {
        LawArg::Exponential => ArrivalLaw::Exponential { rate: a.lambda },
        LawArg::Deterministic => ArrivalLaw::Deterministic { period: 1.0 / a.lambda },
    };
    let base = kingman_analysis(&law, a.mu, 0.0)?;
    let mut table = Table::new(["sigma", "r_hat", "r_hat_first_order", "abs_error"]);
    let mut rows = Vec::new();
    for &sigma in &a.sigma {
        let k = kingman_analysis(&law, a.mu, sigma)?;
        let err = (k.r_hat - k.r_hat_first_order).abs();
        table.push(vec![num(sigma), num(k.r_hat), num(k.r_hat_first_order), num(err)]);
        rows.push(json!({"sigma": sigma, "r_hat": k.r_hat, "r_hat_first_order": k.r_hat_first_order,
                         "abs_error": err, "residual": k.residual}));
    }
    let ts: Vec<f64> = (0..=a.t_max).map(f64::from).collect();
    let result = json!({
        "r_star": base.r_star,
        "r_hat": base.r_hat,
        "f": base.f,
        "residual": base.residual,
        "window_upper": base.window_upper,
        "perturbation": rows,
        "bound_curve": ccdf_bound_curve(base.r_star, a.eta, &ts),
    });
    Ok(doc("kingman", serde_json::to_value(a)?, result, Some(table)))
}
