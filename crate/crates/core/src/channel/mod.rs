//! Physical layer: Rayleigh vector channels, CSI quantization, zero-forcing
//! beams and per-link SINR.

mod beamforming;
mod gains;
mod link;
mod quantize;

pub use beamforming::{zf_beamformers, BeamformerSet, ORTHOGONALITY_TOL};
pub use gains::{sample_effective_gain_distributions, GainSamples};
pub use link::{evaluate_links, transmit_slot, LinkOutcome};
pub use quantize::{
    quantize_csi, quantize_csi_codebook, quantize_perfect, Codebook, CsiMode, CsiQuantizer,
    QuantizedCsi,
};

use num_complex::Complex64;

use crate::numerics::{sample_complex_gaussian_vector, RngStream};

pub type CVector = Vec<Complex64>;

/// One slot of channel vectors, one per user.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub users: Vec<CVector>,
}

impl ChannelRealization {
    /// Draws `users` i.i.d. CN(0, I) vectors of length `antennas`.
    pub fn sample(antennas: usize, users: usize, rng: &mut RngStream) -> Self {
        ChannelRealization {
            users: (0..users).map(|_| sample_complex_gaussian_vector(antennas, rng)).collect(),
        }
    }
}

/// `a† b`.
#[inline]
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub(crate) fn normalized(a: &[Complex64]) -> CVector {
    let n = norm_sqr(a).sqrt();
    a.iter().map(|x| x / n).collect()
}

/// Unit vector `e_i` of length `n`.
pub fn basis_vector(n: usize, i: usize) -> CVector {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[i] = Complex64::new(1.0, 0.0);
    v
}
