//! Command-line front end: `region`, `drate`, `bits`, `simulate` and
//! `kingman`. Every command writes one JSON document or one CSV table whose
//! leading `#` lines record the tool version and the fully resolved inputs.

mod commands;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::delay::DeltaVariant;
use crate::numerics::db_to_linear;
use crate::stability::SystemParams;
use crate::{Error, Result};

pub use output::Format;

#[derive(Debug, Parser)]
#[command(name = "zfsdma", version, about = "Stability, feedback and delay calculators for zero-forcing SDMA queues")]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON file with command parameters. For `simulate` this is the
    /// simulation config; otherwise its keys override the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stability polytope: index set, departure rates and vertices.
    Region(RegionArgs),
    /// Analytic and simulated departure rates per scheduled-queue count.
    Drate(DrateArgs),
    /// Feedback-bit budgets.
    #[command(subcommand)]
    Bits(BitsCommand),
    /// Queue simulation from a JSON config, optionally swept over arrival
    /// scales and feedback sizes.
    Simulate(SimulateArgs),
    /// Kingman tail exponents and their perturbation under service loss.
    Kingman(KingmanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerUnit {
    Db,
    Linear,
}

impl PowerUnit {
    fn to_linear(self, p: f64) -> f64 {
        match self {
            PowerUnit::Db => db_to_linear(p),
            PowerUnit::Linear => p,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LinkArgs {
    /// Antennas `L` (also the number of queues).
    #[arg(long, default_value_t = 3)]
    pub antennas: usize,
    /// Transmit power, in the unit given by `--power-unit`.
    #[arg(long, default_value_t = 12.0)]
    pub power: f64,
    #[arg(long, value_enum, default_value_t = PowerUnit::Db)]
    pub power_unit: PowerUnit,
    /// Linear SINR threshold.
    #[arg(long, default_value_t = 3.0)]
    pub theta: f64,
}

impl LinkArgs {
    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::new(self.antennas, self.power_unit.to_linear(self.power), self.theta)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RegionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub link: LinkArgs,
    /// Also sample the region reachable with per-slot power allocation.
    #[arg(long)]
    pub power_control: bool,
    /// Power grid resolution for `--power-control`.
    #[arg(long, default_value_t = crate::stability::DEFAULT_POWER_GRID)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DrateArgs {
    /// Antenna counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 5])]
    pub antennas: Vec<usize>,
    #[arg(long, default_value_t = 12.0)]
    pub power: f64,
    #[arg(long, value_enum, default_value_t = PowerUnit::Db)]
    pub power_unit: PowerUnit,
    #[arg(long, default_value_t = 3.0)]
    pub theta: f64,
    /// Feedback bits; by default the budget for `--delta` at each `L`.
    #[arg(long, conflicts_with = "perfect")]
    pub bits: Option<u32>,
    /// Perfect CSI instead of quantized feedback.
    #[arg(long)]
    pub perfect: bool,
    /// Loss target for the default budget and the `(1−δ)d` column.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Monte-Carlo slots per row.
    #[arg(long, default_value_t = 100_000)]
    pub slots: u64,
}

#[derive(Debug, Subcommand)]
pub enum BitsCommand {
    /// Bits keeping every departure rate within `1−δ` of perfect CSI.
    Delta(DeltaArgs),
    /// Bits keeping the mean delay within a factor `M` of perfect CSI.
    DelayRatio(DelayRatioArgs),
    /// Bits for a `(1+η)` inflation of the delay tail bound.
    Eta(EtaArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DeltaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub link: LinkArgs,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantArg {
    Guaranteed,
    Relaxed,
}

impl From<VariantArg> for DeltaVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Guaranteed => DeltaVariant::Guaranteed,
            VariantArg::Relaxed => DeltaVariant::Relaxed,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DelayRatioArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub link: LinkArgs,
    /// Target ratio `M > 1`.
    #[arg(long, default_value_t = 2.0)]
    pub m: f64,
    /// Load margin `τ = 1 − λ/μ`.
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::Guaranteed)]
    pub variant: VariantArg,
    /// First and last bit count of the `M` versus `B` curve.
    #[arg(long, default_value_t = 12)]
    pub curve_from: u32,
    #[arg(long, default_value_t = 30)]
    pub curve_to: u32,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EtaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub link: LinkArgs,
    #[arg(long, default_value_t = 0.1)]
    pub eta: f64,
    /// With `--mu`, add the tail bound curve of a Poisson(λ) queue.
    #[arg(long, requires = "mu")]
    pub lambda: Option<f64>,
    #[arg(long, requires = "lambda")]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 30)]
    pub t_max: u32,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Slot trace CSV (single runs only).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Arrival-rate scales; enables sweep mode.
    #[arg(long, value_delimiter = ',')]
    pub scales: Vec<f64>,
    /// Feedback sizes for sweep mode, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub bits: Vec<u32>,
    /// Add a perfect-CSI curve to the sweep.
    #[arg(long)]
    pub perfect: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawArg {
    Exponential,
    Deterministic,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KingmanArgs {
    /// Arrival rate (packets per slot).
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// Per-slot service probability.
    #[arg(long, default_value_t = 0.8)]
    pub mu: f64,
    /// Inter-arrival law with mean `1/λ`.
    #[arg(long, value_enum, default_value_t = LawArg::Exponential)]
    pub law: LawArg,
    /// Relative service losses `σ` for the perturbation table.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.01, 0.001, 0.0001])]
    pub sigma: Vec<f64>,
    /// Tail-bound slack `η`.
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 30)]
    pub t_max: u32,
}

/// Keys of `config` override the matching fields of `args`; unknown keys are
/// rejected.
fn overlay<T>(args: &T, config: Option<&serde_json::Value>) -> Result<T>
where
    T: Serialize + for<'de> Deserialize<'de>,
{
    let mut value = serde_json::to_value(args)?;
    let Some(config) = config else { return serde_json::from_value(value).map_err(Into::into) };
    let (Some(base), Some(over)) = (value.as_object_mut(), config.as_object()) else {
        return Err(Error::Config("config file must hold a JSON object".into()));
    };
    for (k, v) in over {
        if !base.contains_key(k) {
            return Err(Error::Config(format!("unknown key `{k}`")));
        }
        base.insert(k.clone(), v.clone());
    }
    serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))
}

fn read_config(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code: 0 on success, 2 for usage errors, 3 for numeric or
/// infeasibility errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                3
            }
        }
    }
}

/// Runs a parsed command line, writing to `--out` or stdout.
pub fn execute(cli: &Cli) -> Result<()> {
    let doc = commands::dispatch(cli)?;
    let text = doc.render(cli.format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}
