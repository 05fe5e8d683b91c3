use super::{inner, zf_beamformers, CVector, CsiQuantizer};
use crate::numerics::{sample_complex_gaussian_vector, RngStream};
use crate::{Error, Result};

/// Raw samples of the effective channel gains seen by the first scheduled
/// user, for comparison with reference laws.
#[derive(Debug, Clone, Default)]
pub struct GainSamples {
    /// `|f_1† h_1|²`.
    pub signal: Vec<f64>,
    /// `|f_2† h_1|²`, empty when `k = 1`.
    pub interference: Vec<f64>,
    /// `|f_2† h_1|² / ε_1`, only from draws with `ε_1 > 0`.
    pub normalized_interference: Vec<f64>,
    /// Degenerate CSI sets that were redrawn.
    pub resampled: usize,
}

/// Draws `n` independent slots with `k` of `antennas` users scheduled and
/// records the gains of the first scheduled user.
pub fn sample_effective_gain_distributions(
    antennas: usize,
    k: usize,
    quantizer: &CsiQuantizer,
    n: usize,
    rng: &mut RngStream,
) -> Result<GainSamples> {
    if k == 0 || k > antennas {
        return Err(Error::domain(format!("need 1 <= k <= {antennas}, got {k}")));
    }
    let scheduled: Vec<usize> = (0..k).collect();
    let mut out = GainSamples {
        signal: Vec::with_capacity(n),
        interference: Vec::with_capacity(if k > 1 { n } else { 0 }),
        ..GainSamples::default()
    };
    while out.signal.len() < n {
        let hs: Vec<CVector> = (0..k).map(|_| sample_complex_gaussian_vector(antennas, rng)).collect();
        let mut csi = Vec::with_capacity(k);
        let mut eps = 0.0;
        for (i, h) in hs.iter().enumerate() {
            let q = quantizer.quantize(h, rng)?;
            if i == 0 {
                eps = q.error;
            }
            csi.push(q.direction);
        }
        let beams = match zf_beamformers(&scheduled, &csi, 1.0) {
            Ok(b) => b,
            Err(Error::DegenerateGeometry(_)) => {
                out.resampled += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        out.signal.push(inner(&beams.beams[0], &hs[0]).norm_sqr());
        if k > 1 {
            let t = inner(&beams.beams[1], &hs[0]).norm_sqr();
            out.interference.push(t);
            if eps > 0.0 {
                out.normalized_interference.push(t / eps);
            }
        }
    }
    Ok(out)
}
