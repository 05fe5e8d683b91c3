use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{inner, norm_sqr, normalized, CVector};
use crate::numerics::{sample_complex_gaussian_vector, RngStream};
use crate::{Error, Result};

/// Reported channel direction together with its realized quantization
/// error `ε = 1 − |ĥ†h|²/‖h‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedCsi {
    pub direction: CVector,
    pub error: f64,
}

/// How mobiles report their channel direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum CsiMode {
    /// Exact direction, no error.
    Perfect,
    /// Sphere-cap model with `bits` bits per mobile.
    SphereCap { bits: u32 },
    /// Nearest entry of a random `2^bits` codebook drawn from `seed`.
    Codebook { bits: u32, seed: u64 },
}

impl CsiMode {
    pub fn bits(&self) -> Option<u32> {
        match *self {
            CsiMode::Perfect => None,
            CsiMode::SphereCap { bits } | CsiMode::Codebook { bits, .. } => Some(bits),
        }
    }
}

/// Unit-norm quantization codebook.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    entries: Vec<CVector>,
}

impl Codebook {
    pub fn new(entries: Vec<CVector>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::domain("codebook is empty"));
        };
        let dim = first.len();
        for e in &entries {
            if e.len() != dim {
                return Err(Error::domain("codebook entries differ in length"));
            }
            if (norm_sqr(e) - 1.0).abs() > 1e-9 {
                return Err(Error::domain("codebook entries must have unit norm"));
            }
        }
        Ok(Codebook { entries })
    }

    /// `2^bits` isotropic unit vectors of length `dim`.
    pub fn random(dim: usize, bits: u32, rng: &mut RngStream) -> Result<Self> {
        if dim == 0 || bits == 0 || bits > 24 {
            return Err(Error::domain("random codebook needs dim >= 1 and 1 <= bits <= 24"));
        }
        let entries = (0..1usize << bits)
            .map(|_| normalized(&sample_complex_gaussian_vector(dim, rng)))
            .collect();
        Ok(Codebook { entries })
    }

    pub fn entries(&self) -> &[CVector] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries[0].len()
    }
}

fn check_channel(h: &[Complex64]) -> Result<f64> {
    let n2 = norm_sqr(h);
    if !(n2 > 0.0 && n2.is_finite()) {
        return Err(Error::domain("channel vector must be nonzero and finite"));
    }
    Ok(n2)
}

/// Exact CSI: `ĥ = h/‖h‖`, `ε = 0`.
pub fn quantize_perfect(h: &[Complex64]) -> Result<QuantizedCsi> {
    check_channel(h)?;
    Ok(QuantizedCsi { direction: normalized(h), error: 0.0 })
}

/// Sphere-cap quantization with `bits` bits.
///
/// The error is drawn from its CDF `2^B a^{L−1}` on `[0, 2^{−B/(L−1)}]` by
/// inversion, and the reported direction is placed uniformly on the boundary
/// of the resulting cone around `h/‖h‖`.
pub fn quantize_csi(h: &[Complex64], bits: u32, rng: &mut RngStream) -> Result<QuantizedCsi> {
    let l = h.len();
    if l < 2 {
        return Err(Error::Unsupported("quantization needs at least two antennas".into()));
    }
    if bits == 0 {
        return Err(Error::domain("feedback bits must be at least 1"));
    }
    check_channel(h)?;
    let s = normalized(h);
    let dof = (l - 1) as f64;
    let u = 1.0 - rng.uniform();
    let eps = u.powf(1.0 / dof) * (-(bits as f64) / dof).exp2();
    let w = loop {
        let mut g = sample_complex_gaussian_vector(l, rng);
        let c = inner(&s, &g);
        for (gi, si) in g.iter_mut().zip(&s) {
            *gi -= c * si;
        }
        let n2 = norm_sqr(&g);
        if n2 > 1e-12 {
            break normalized(&g);
        }
    };
    let (a, b) = ((1.0 - eps).sqrt(), eps.sqrt());
    let direction = s.iter().zip(&w).map(|(si, wi)| si * a + wi * b).collect();
    Ok(QuantizedCsi { direction, error: eps })
}

/// Picks the codebook entry best aligned with `h`.
pub fn quantize_csi_codebook(h: &[Complex64], codebook: &Codebook) -> Result<QuantizedCsi> {
    if codebook.dim() != h.len() {
        return Err(Error::domain("codebook dimension does not match the channel"));
    }
    let n2 = check_channel(h)?;
    let (best, gain) = codebook
        .entries
        .iter()
        .map(|c| inner(c, h).norm_sqr())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
    Ok(QuantizedCsi {
        direction: codebook.entries[best].clone(),
        error: (1.0 - gain / n2).max(0.0),
    })
}

/// A [`CsiMode`] bound to an antenna count, ready to quantize.
#[derive(Debug, Clone)]
pub enum CsiQuantizer {
    Perfect,
    SphereCap { bits: u32 },
    Codebook(Codebook),
}

impl CsiQuantizer {
    pub fn new(mode: CsiMode, antennas: usize) -> Result<Self> {
        Ok(match mode {
            CsiMode::Perfect => CsiQuantizer::Perfect,
            CsiMode::SphereCap { bits } => {
                if antennas < 2 {
                    return Err(Error::Unsupported(
                        "quantization needs at least two antennas".into(),
                    ));
                }
                if bits == 0 {
                    return Err(Error::domain("feedback bits must be at least 1"));
                }
                CsiQuantizer::SphereCap { bits }
            }
            CsiMode::Codebook { bits, seed } => {
                CsiQuantizer::Codebook(Codebook::random(antennas, bits, &mut RngStream::new(seed))?)
            }
        })
    }

    pub fn quantize(&self, h: &[Complex64], rng: &mut RngStream) -> Result<QuantizedCsi> {
        match self {
            CsiQuantizer::Perfect => quantize_perfect(h),
            CsiQuantizer::SphereCap { bits } => quantize_csi(h, *bits, rng),
            CsiQuantizer::Codebook(cb) => quantize_csi_codebook(h, cb),
        }
    }

    pub fn is_perfect(&self) -> bool {
        matches!(self, CsiQuantizer::Perfect)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::basis_vector;

    fn residual_error(q: &QuantizedCsi, h: &[Complex64]) -> f64 {
        1.0 - inner(&q.direction, h).norm_sqr() / norm_sqr(h)
    }

    #[test]
    fn perfect_mode_is_exact() {
        let mut rng = RngStream::new(1);
        let h = sample_complex_gaussian_vector(4, &mut rng);
        let q = quantize_perfect(&h).unwrap();
        assert_eq!(q.error, 0.0);
        assert!(residual_error(&q, &h).abs() < 1e-14);
    }

    #[test]
    fn sphere_cap_error_is_consistent() {
        let mut rng = RngStream::new(2);
        for _ in 0..1000 {
            let h = sample_complex_gaussian_vector(3, &mut rng);
            let q = quantize_csi(&h, 6, &mut rng).unwrap();
            assert!((norm_sqr(&q.direction) - 1.0).abs() < 1e-12);
            assert!((residual_error(&q, &h) - q.error).abs() < 1e-10);
            assert!(q.error >= 0.0 && q.error <= 2f64.powf(-3.0));
        }
    }

    #[test]
    fn sphere_cap_rejects_bad_input() {
        let mut rng = RngStream::new(3);
        let h1 = vec![Complex64::new(1.0, 0.0)];
        assert!(matches!(quantize_csi(&h1, 4, &mut rng), Err(Error::Unsupported(_))));
        let h = basis_vector(3, 0);
        assert!(matches!(quantize_csi(&h, 0, &mut rng), Err(Error::Domain(_))));
        let zero = vec![Complex64::new(0.0, 0.0); 3];
        assert!(quantize_csi(&zero, 4, &mut rng).is_err());
    }

    #[test]
    fn codebook_picks_exact_entry() {
        let cb = Codebook::new((0..3).map(|i| basis_vector(3, i)).collect()).unwrap();
        let q = quantize_csi_codebook(&basis_vector(3, 0), &cb).unwrap();
        assert_eq!(q.direction, basis_vector(3, 0));
        assert_eq!(q.error, 0.0);

        let mut rng = RngStream::new(4);
        let h = sample_complex_gaussian_vector(3, &mut rng);
        let cb = Codebook::new(vec![basis_vector(3, 1), normalized(&h)]).unwrap();
        let q = quantize_csi_codebook(&h, &cb).unwrap();
        assert!(q.error < 1e-12);
    }

    #[test]
    fn codebook_validation() {
        assert!(Codebook::new(vec![]).is_err());
        let bad = vec![vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)]];
        assert!(Codebook::new(bad).is_err());
        let cb = Codebook::random(3, 4, &mut RngStream::new(5)).unwrap();
        assert_eq!(cb.entries().len(), 16);
        assert!(quantize_csi_codebook(&basis_vector(2, 0), &cb).is_err());
    }

    #[test]
    fn csi_mode_serde() {
        let m: CsiMode = serde_json::from_str(r#"{"mode":"sphere_cap","bits":8}"#).unwrap();
        assert_eq!(m, CsiMode::SphereCap { bits: 8 });
        assert_eq!(m.bits(), Some(8));
        assert!(serde_json::from_str::<CsiMode>(r#"{"mode":"sphere_cap","bits":8,"x":1}"#).is_err());
    }
}
