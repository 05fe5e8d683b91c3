//! Slotted multi-queue simulator: renewal arrivals, per-slot CSI feedback,
//! zero-forcing transmission with SINR-threshold ARQ, and pluggable
//! scheduling policies.

mod config;
mod engine;
mod estimate;
mod metrics;
mod scan;

pub use config::{PolicyConfig, SimConfig};
pub use engine::run;
pub use estimate::{estimate_departure_rate, DepartureEstimate};
pub use metrics::{
    CcdfPoint, DelaySummary, QueueMetrics, SimMetrics, StabilityVerdict, TraceRow, Verdict,
};
pub use scan::{stability_scan, sweep, ScanPoint, ScanReport, SweepPoint};

/// Stream identifiers for [`crate::numerics::RngStream::derive`].
pub(crate) mod streams {
    pub const ARRIVALS: u64 = 1;
    pub const CHANNEL: u64 = 2;
    pub const QUANTIZATION: u64 = 3;
    pub const POLICY: u64 = 4;
    pub const ESTIMATE: u64 = 5;
    pub const SCAN: u64 = 6;
}
