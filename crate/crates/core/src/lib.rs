//! Analytic and Monte-Carlo workbench for zero-forcing SDMA downlinks with
//! per-user packet queues.
//!
//! The crate covers four layers:
//!
//! - [`channel`]: Rayleigh vector channels, sphere-cap CSI quantization,
//!   zero-forcing beams and SINR evaluation.
//! - [`stability`]: per-queue departure rates, the stability polytope, LP
//!   membership/decomposition and the max-weight control rule.
//! - [`delay`]: feedback-bit budgets, Pollaczek-Khinchin mean delay and
//!   Kingman tail exponents with their first-order perturbation.
//! - [`sim`]: a slotted multi-queue simulator running any of the policies
//!   over the physical layer above.
//!
//! [`numerics`] holds the shared special functions, samplers, root finder and
//! a dense simplex solver. [`cli`] backs the `zfsdma` binary.

pub mod channel;
pub mod cli;
pub mod delay;
mod error;
pub mod numerics;
pub mod sim;
pub mod stability;

pub use error::{Error, Result};

/// Largest antenna count supported by the decision-space enumerations.
pub const MAX_ANTENNAS: usize = 16;
