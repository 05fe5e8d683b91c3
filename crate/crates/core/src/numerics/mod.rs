//! Shared numerical building blocks.

mod gamma;
pub mod lp;
mod rng;
mod root;
pub mod stats;

pub use gamma::{regularized_upper_gamma, Probability};
pub use rng::{sample_complex_gaussian_vector, RngStream};
pub use root::find_root_bracketed;

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
