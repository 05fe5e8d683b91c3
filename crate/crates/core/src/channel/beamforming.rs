use num_complex::Complex64;

use super::{inner, norm_sqr, CVector};
use crate::{Error, Result};

/// Maximum tolerated leakage `|f_ℓ† ĥ_m|` of a zero-forcing beam.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Relative residual below which a vector counts as lying in the span of
/// the others.
const RANK_TOL: f64 = 1e-10;

/// Zero-forcing beams for one scheduled set.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet {
    /// Scheduled user indices, in the order of `beams`.
    pub scheduled: Vec<usize>,
    pub beams: Vec<CVector>,
    /// Power per scheduled stream, `P/K`.
    pub gamma: f64,
}

impl BeamformerSet {
    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }
}

/// Removes the components of `v` along the orthonormal `basis`, twice.
fn project_out(v: &mut [Complex64], basis: &[CVector]) {
    for _ in 0..2 {
        for q in basis {
            let c = inner(q, v);
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= c * qi;
            }
        }
    }
}

/// Zero-forcing beams for the reported directions `csi`, where `csi[i]`
/// belongs to user `scheduled[i]`.
///
/// Each beam is the normalized projection of its own direction onto the
/// orthogonal complement of the other scheduled directions, built by
/// Gram-Schmidt with one re-orthogonalization pass.
pub fn zf_beamformers(scheduled: &[usize], csi: &[CVector], power: f64) -> Result<BeamformerSet> {
    let k = csi.len();
    if scheduled.len() != k {
        return Err(Error::domain("scheduled set and CSI list differ in length"));
    }
    if k == 0 {
        return Ok(BeamformerSet { scheduled: vec![], beams: vec![], gamma: 0.0 });
    }
    let dim = csi[0].len();
    if csi.iter().any(|c| c.len() != dim) {
        return Err(Error::domain("CSI vectors differ in length"));
    }
    if k > dim {
        return Err(Error::DegenerateGeometry(format!(
            "{k} streams exceed {dim} antennas"
        )));
    }
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::domain("power must be positive and finite"));
    }

    let mut beams = Vec::with_capacity(k);
    let mut basis: Vec<CVector> = Vec::with_capacity(k);
    for l in 0..k {
        basis.clear();
        for (m, v) in csi.iter().enumerate() {
            if m == l {
                continue;
            }
            let scale = norm_sqr(v).sqrt();
            let mut u = v.clone();
            project_out(&mut u, &basis);
            let n = norm_sqr(&u).sqrt();
            if n <= RANK_TOL * scale {
                return Err(Error::DegenerateGeometry("CSI vectors are linearly dependent".into()));
            }
            u.iter_mut().for_each(|x| *x /= n);
            basis.push(u);
        }
        let scale = norm_sqr(&csi[l]).sqrt();
        let mut f = csi[l].clone();
        project_out(&mut f, &basis);
        let n = norm_sqr(&f).sqrt();
        if n <= RANK_TOL * scale {
            return Err(Error::DegenerateGeometry("CSI vectors are linearly dependent".into()));
        }
        f.iter_mut().for_each(|x| *x /= n);
        beams.push(f);
    }
    Ok(BeamformerSet { scheduled: scheduled.to_vec(), beams, gamma: power / k as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{basis_vector, normalized};
    use crate::numerics::{sample_complex_gaussian_vector, RngStream};
    use proptest::prelude::*;

    #[test]
    fn single_stream_is_matched_filter() {
        let e1 = basis_vector(3, 0);
        let b = zf_beamformers(&[2], &[e1.clone()], 6.0).unwrap();
        assert_eq!(b.beams[0], e1);
        assert_eq!(b.gamma, 6.0);
        assert_eq!(b.scheduled, vec![2]);
    }

    #[test]
    fn orthogonal_inputs_pass_through() {
        let (e1, e2) = (basis_vector(2, 0), basis_vector(2, 1));
        let b = zf_beamformers(&[0, 1], &[e1.clone(), e2.clone()], 2.0).unwrap();
        for (f, e) in b.beams.iter().zip([e1, e2]) {
            for (x, y) in f.iter().zip(&e) {
                assert!((x - y).norm() < 1e-15);
            }
        }
        assert_eq!(b.gamma, 1.0);
    }

    #[test]
    fn dependent_set_is_degenerate() {
        let v = basis_vector(3, 0);
        let w: CVector = v.iter().map(|x| x * Complex64::new(0.0, 2.0)).collect();
        let err = zf_beamformers(&[0, 1], &[v, w], 1.0).unwrap_err();
        assert!(matches!(err, Error::DegenerateGeometry(_)));
        let many: Vec<CVector> = (0..3).map(|i| basis_vector(2, i % 2)).collect();
        assert!(zf_beamformers(&[0, 1, 2], &many, 1.0).is_err());
    }

    #[test]
    fn random_full_sets_are_orthogonal() {
        let mut rng = RngStream::new(11);
        for _ in 0..10_000 {
            let csi: Vec<CVector> =
                (0..3).map(|_| normalized(&sample_complex_gaussian_vector(3, &mut rng))).collect();
            let b = zf_beamformers(&[0, 1, 2], &csi, 1.0).unwrap();
            for (l, f) in b.beams.iter().enumerate() {
                assert!((norm_sqr(f) - 1.0).abs() < 1e-12);
                for (m, h) in csi.iter().enumerate() {
                    if m != l {
                        assert!(inner(f, h).norm() <= ORTHOGONALITY_TOL);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn orthogonality_holds_for_any_subset(seed in any::<u64>(), l in 2usize..=6, k in 1usize..=6) {
            let k = k.min(l);
            let mut rng = RngStream::new(seed);
            let csi: Vec<CVector> =
                (0..k).map(|_| normalized(&sample_complex_gaussian_vector(l, &mut rng))).collect();
            let idx: Vec<usize> = (0..k).collect();
            let b = zf_beamformers(&idx, &csi, 1.0).unwrap();
            for (i, f) in b.beams.iter().enumerate() {
                prop_assert!((norm_sqr(f) - 1.0).abs() < 1e-12);
                prop_assert!(inner(f, &csi[i]).norm() > 0.0);
                for (m, h) in csi.iter().enumerate() {
                    if m != i {
                        prop_assert!(inner(f, h).norm() <= ORTHOGONALITY_TOL);
                    }
                }
            }
        }
    }
}
