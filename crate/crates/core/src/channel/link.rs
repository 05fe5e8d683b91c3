use num_complex::Complex64;

use super::{inner, zf_beamformers, BeamformerSet, CVector, CsiQuantizer};
use crate::numerics::{sample_complex_gaussian_vector, RngStream};
use crate::Result;

/// Result of one transmission to one scheduled user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkOutcome {
    pub user: usize,
    /// `|f_ℓ† h_ℓ|²`.
    pub signal: f64,
    /// `Σ_{m≠ℓ} |f_m† h_ℓ|²`.
    pub interference: f64,
    pub sinr: f64,
    /// `sinr >= theta`.
    pub success: bool,
}

/// SINR of every scheduled link, `γ|f_ℓ†h_ℓ|² / (1 + γ Σ_{m≠ℓ} |f_m†h_ℓ|²)`.
///
/// `channels[i]` is the true channel of user `beams.scheduled[i]`. With exact
/// CSI the interference sum vanishes up to rounding and the value is the
/// plain SNR.
pub fn evaluate_links(channels: &[CVector], beams: &BeamformerSet, theta: f64) -> Vec<LinkOutcome> {
    channels
        .iter()
        .enumerate()
        .map(|(l, h)| {
            let mut signal = 0.0;
            let mut interference = 0.0;
            for (m, f) in beams.beams.iter().enumerate() {
                let g = inner(f, h).norm_sqr();
                if m == l {
                    signal = g;
                } else {
                    interference += g;
                }
            }
            let sinr = beams.gamma * signal / (1.0 + beams.gamma * interference);
            LinkOutcome {
                user: beams.scheduled[l],
                signal,
                interference,
                sinr,
                success: sinr >= theta,
            }
        })
        .collect()
}

/// One slot of the physical layer for the users in `scheduled`: draw their
/// channels, quantize, beamform with power `power` and evaluate the links.
///
/// Channels come from `channel_rng` and quantization randomness from
/// `quant_rng`, so CSI modes compared under matched seeds see identical
/// channels. A degenerate CSI set is returned as an error for the caller to
/// resample.
pub fn transmit_slot(
    antennas: usize,
    scheduled: &[usize],
    power: f64,
    theta: f64,
    quantizer: &CsiQuantizer,
    channel_rng: &mut RngStream,
    quant_rng: &mut RngStream,
) -> Result<Vec<LinkOutcome>> {
    if scheduled.is_empty() {
        return Ok(vec![]);
    }
    let channels: Vec<Vec<Complex64>> = scheduled
        .iter()
        .map(|_| sample_complex_gaussian_vector(antennas, channel_rng))
        .collect();
    let mut csi = Vec::with_capacity(scheduled.len());
    for h in &channels {
        csi.push(quantizer.quantize(h, quant_rng)?.direction);
    }
    let beams = zf_beamformers(scheduled, &csi, power)?;
    Ok(evaluate_links(&channels, &beams, theta))
}
