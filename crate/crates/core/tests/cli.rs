use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn zfsdma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zfsdma")).args(args).output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_body(out: &Output) -> Vec<String> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8_lossy(&out.stdout).lines().filter(|l| !l.starts_with('#')).map(String::from).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn region_vertex_counts() {
    for (l, power, expected) in [("3", "0.5", 4), ("3", "10", 8), ("1", "2", 2)] {
        let out = zfsdma(&["region", "--antennas", l, "--power", power, "--power-unit", "linear", "--theta", "1"]);
        let v = json_of(&out);
        assert_eq!(v["result"]["vertices"].as_array().unwrap().len(), expected);
        assert_eq!(v["meta"]["command"], "region");
        assert_eq!(v["meta"]["config"]["antennas"].as_u64().unwrap(), l.parse::<u64>().unwrap());
    }
}

#[test]
fn region_csv_with_power_control() {
    let out = zfsdma(&[
        "region", "--antennas", "2", "--power", "4", "--power-unit", "linear", "--theta", "1", "--power-control",
        "--grid", "4", "--format", "csv",
    ]);
    let body = csv_body(&out);
    assert_eq!(body[0], "kind,k,x_1,x_2");
    assert_eq!(body.iter().filter(|r| r.starts_with("vertex,")).count(), 4);
    // Origin, 2 singletons and 3 splits of 4 power steps.
    assert_eq!(body.iter().filter(|r| r.starts_with("power_control,")).count(), 6);
}

#[test]
fn bits_delta_and_eta() {
    let v = json_of(&zfsdma(&["bits", "delta", "--antennas", "3", "--power", "12", "--theta", "3", "--delta", "0.1"]));
    assert_eq!(v["result"]["bits"], 17);
    let a = json_of(&zfsdma(&["bits", "eta", "--eta", "0.2"]));
    let b = json_of(&zfsdma(&["bits", "eta", "--eta", "0.1"]));
    let diff = b["result"]["bits_real"].as_f64().unwrap() - a["result"]["bits_real"].as_f64().unwrap();
    assert!((diff - 2.0).abs() < 1e-9);
    let c = json_of(&zfsdma(&["bits", "eta", "--eta", "0.1", "--lambda", "0.5", "--mu", "0.8", "--t-max", "5"]));
    let curve = c["result"]["bound_curve"].as_array().unwrap();
    assert_eq!(curve.len(), 6);
    assert!((curve[0][1].as_f64().unwrap() - 1.1).abs() < 1e-12);
}

#[test]
fn bits_delay_ratio_curve() {
    let out = zfsdma(&[
        "bits", "delay-ratio", "--m", "1.5", "--tau", "0.5", "--curve-from", "15", "--curve-to", "30", "--format", "csv",
    ]);
    let body = csv_body(&out);
    assert_eq!(body[0], "bits,m_exact,m_asymptotic,m_asymptotic_full");
    assert_eq!(body.len(), 17);
    let last: Vec<f64> = body[16].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[1] / last[2] - 1.0).abs() < 0.01);
    let v = json_of(&zfsdma(&["bits", "delay-ratio", "--m", "1.5", "--variant", "relaxed"]));
    assert_eq!(v["result"]["variant"], "relaxed");
}

#[test]
fn kingman_reference_point() {
    let v = json_of(&zfsdma(&["kingman", "--lambda", "0.5", "--mu", "0.8", "--sigma", "0"]));
    let r = v["result"]["r_star"].as_f64().unwrap();
    assert!((r - 0.531).abs() < 1e-3);
    assert_eq!(v["result"]["perturbation"][0]["r_hat"].as_f64().unwrap(), r);
    let table = csv_body(&zfsdma(&["kingman", "--format", "csv"]));
    assert_eq!(table.len(), 5);
}

#[test]
fn exit_codes() {
    assert_eq!(zfsdma(&["kingman", "--lambda", "0.9", "--mu", "0.8"]).status.code(), Some(3));
    assert_eq!(zfsdma(&["bits", "eta", "--eta", "1.5"]).status.code(), Some(2));
    assert_eq!(zfsdma(&["bits", "delay-ratio", "--m", "1"]).status.code(), Some(2));
    assert_eq!(zfsdma(&["region", "--antennas", "0"]).status.code(), Some(2));
    assert_eq!(zfsdma(&["region", "--bogus"]).status.code(), Some(2));
    assert_eq!(zfsdma(&["simulate"]).status.code(), Some(2));
    assert_eq!(zfsdma(&["--version"]).status.code(), Some(0));
}

#[test]
fn config_file_overrides_and_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", r#"{"antennas": 2, "power": 10, "power_unit": "linear", "theta": 1}"#);
    let v = json_of(&zfsdma(&["region", "--config", &good]));
    assert_eq!(v["result"]["params"]["antennas"], 2);
    let bad = write(dir.path(), "bad.json", r#"{"antennas": 2, "colour": "red"}"#);
    let out = zfsdma(&["region", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    assert_eq!(zfsdma(&["region", "--config", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn simulate_zero_arrivals_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "zero.json",
        r#"{"params": {"antennas": 2, "power": 10.0, "theta": 1.0},
            "arrivals": [{"law": "exponential", "rate": 0.0}, {"law": "exponential", "rate": 0.0}],
            "policy": {"policy": "max_weight"}, "horizon": 500}"#,
    );
    let trace = dir.path().join("trace.csv");
    let v = json_of(&zfsdma(&["simulate", "--config", &cfg, "--trace", trace.to_str().unwrap()]));
    assert_eq!(v["result"]["total_arrivals"], 0);
    assert_eq!(v["result"]["mean_total_length"]["mean"], 0.0);
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("slot,q_1,q_2,decision,departures\n"));
    assert_eq!(text.lines().count(), 501);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0,0,0,0")));
}

#[test]
fn simulate_single_queue_delay() {
    let dir = tempfile::tempdir().unwrap();
    // Service probability e^{-θ/P} = 0.8.
    let cfg = write(
        dir.path(),
        "mg1.json",
        r#"{"params": {"antennas": 1, "power": 1.0, "theta": 0.22314355131420976},
            "arrivals": [{"law": "exponential", "rate": 0.4}],
            "policy": {"policy": "fixed", "queues": [0]}, "horizon": 500000, "seed": 5}"#,
    );
    let v = json_of(&zfsdma(&["simulate", "--config", &cfg]));
    let w = v["result"]["delay"]["mean_waiting"].as_f64().unwrap();
    assert!((w / 0.75 - 1.0).abs() < 0.05, "{w}");
}

#[test]
fn simulate_sweep_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.json",
        r#"{"params": {"antennas": 2, "power": 15.85, "theta": 3.0},
            "arrivals": [{"law": "exponential", "rate": 0.05}, {"law": "exponential", "rate": 0.05}],
            "policy": {"policy": "fixed", "queues": [0, 1]}, "horizon": 4000}"#,
    );
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let o = zfsdma(&[
            "simulate", "--config", &cfg, "--scales", "1,2", "--bits", "4,8", "--perfect", "--seed", "3", "--format",
            "csv", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read(&out1).unwrap();
    assert_eq!(a, std::fs::read(&out2).unwrap());
    let text = String::from_utf8(a).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body.len(), 7);
    assert!(body[1].starts_with("B4,1,"));
    assert!(body[3].starts_with("perfect,1,"));
    assert!(text.contains("\"seed\":3"));
}

#[test]
fn drate_perfect_rows() {
    let body = csv_body(&zfsdma(&[
        "drate", "--antennas", "2,3", "--perfect", "--slots", "20000", "--seed", "9", "--format", "csv",
    ]));
    assert_eq!(body[0], "antennas,k,bits,d,d_hat,std_error,d_ref");
    assert_eq!(body.len(), 6);
    for row in &body[1..] {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[2], "perfect");
        let (d, d_hat, se): (f64, f64, f64) = (f[3].parse().unwrap(), f[4].parse().unwrap(), f[5].parse().unwrap());
        assert!((d - d_hat).abs() <= 4.0 * se.max(1e-4), "{row}");
    }
}
