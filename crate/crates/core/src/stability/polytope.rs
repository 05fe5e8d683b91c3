use serde::Serialize;

use super::{DecisionVector, RateTable, RateVector, StationaryPolicy, SystemParams};
use crate::numerics::lp::{minimize, LpOutcome, LP_TOL};
use crate::{Error, Result};

/// Counts `k` whose sum rate `k d(k)` strictly beats every smaller count,
/// with `0` always included.
pub fn index_set(params: &SystemParams) -> Result<Vec<usize>> {
    let table = RateTable::new(params)?;
    Ok(index_set_from(&table))
}

fn index_set_from(table: &RateTable) -> Vec<usize> {
    let mut set = vec![0];
    let mut best = 0.0;
    for k in 1..=table.antennas() {
        let s = k as f64 * table.get(k);
        if s > best {
            set.push(k);
            best = s;
        }
    }
    set
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Vertex {
    pub decision: DecisionVector,
    pub point: RateVector,
}

/// Stability region of the perfect-CSI system: the convex hull of
/// `{d(‖v‖₁) v}` over all decisions `v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityPolytope {
    pub params: SystemParams,
    pub index_set: Vec<usize>,
    /// `d(0) = 0, d(1), …, d(L)`.
    pub d: RateTable,
    /// Extreme points, origin first, then by count and mask.
    pub vertices: Vec<Vertex>,
    /// `max_k k d(k)`.
    pub max_sum_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Weight of each vertex, aligned with [`StabilityPolytope::vertices`].
    pub vertex_weights: Vec<f64>,
    /// The same weights as a randomized scheduling policy.
    pub policy: StationaryPolicy,
    /// `Σ b_n u_n`, which dominates the requested rate vector.
    pub service: RateVector,
}

#[derive(Serialize)]
struct Export<'a> {
    params: &'a SystemParams,
    index_set: &'a [usize],
    d: &'a [f64],
    vertices: Vec<&'a [f64]>,
}

/// Builds the polytope from the index-set scan.
pub fn stability_polytope(params: &SystemParams) -> Result<StabilityPolytope> {
    params.validate()?;
    let l = params.antennas;
    let d = RateTable::new(params)?;
    let index_set = index_set_from(&d);
    let mut vertices = Vec::new();
    for &k in &index_set {
        for mask in 0u32..1 << l {
            if mask.count_ones() as usize != k {
                continue;
            }
            let decision = DecisionVector::from_mask(mask, l)?;
            let point = (0..l).map(|i| if decision.contains(i) { d.get(k) } else { 0.0 }).collect();
            vertices.push(Vertex { decision, point: RateVector::new(point)? });
        }
    }
    let max_sum_rate = (1..=l).map(|k| k as f64 * d.get(k)).fold(0.0, f64::max);
    Ok(StabilityPolytope { params: *params, index_set, d, vertices, max_sum_rate })
}

impl StabilityPolytope {
    pub fn antennas(&self) -> usize {
        self.params.antennas
    }

    /// JSON document `{params, index_set, d, vertices}`.
    pub fn to_json(&self) -> serde_json::Value {
        let export = Export {
            params: &self.params,
            index_set: &self.index_set,
            d: self.d.as_slice(),
            vertices: self.vertices.iter().map(|v| v.point.as_slice()).collect(),
        };
        serde_json::to_value(export).expect("polytope export is always serializable")
    }

    fn check_dim(&self, lambda: &RateVector) -> Result<()> {
        if lambda.len() != self.antennas() {
            return Err(Error::domain(format!(
                "rate vector has {} entries, expected {}",
                lambda.len(),
                self.antennas()
            )));
        }
        Ok(())
    }

    /// Constraint rows `Σ_n b_n u_n − s − t·dir = rhs`, `Σ_n b_n = 1` over
    /// variables `[b (n), s (L), t (0 or 1)]`.
    fn lp_rows(&self, scale_dir: Option<&[f64]>) -> Vec<Vec<f64>> {
        let n = self.vertices.len();
        let l = self.antennas();
        let extra = scale_dir.is_some() as usize;
        let cols = n + l + extra;
        let mut rows = Vec::with_capacity(l + 1);
        for i in 0..l {
            let mut row = vec![0.0; cols];
            for (j, v) in self.vertices.iter().enumerate() {
                row[j] = v.point[i];
            }
            row[n + i] = -1.0;
            if let Some(dir) = scale_dir {
                row[n + l] = -dir[i];
            }
            rows.push(row);
        }
        let mut sum = vec![0.0; cols];
        sum[..n].iter_mut().for_each(|x| *x = 1.0);
        rows.push(sum);
        rows
    }

    fn feasible_weights(&self, lambda: &RateVector, tol: f64) -> Result<Option<Vec<f64>>> {
        self.check_dim(lambda)?;
        let n = self.vertices.len();
        let rows = self.lp_rows(None);
        let mut rhs: Vec<f64> = lambda.as_slice().iter().map(|x| (x - tol).max(0.0)).collect();
        rhs.push(1.0);
        let c = vec![0.0; rows[0].len()];
        match minimize(&c, &rows, &rhs)? {
            LpOutcome::Optimal { x, .. } => Ok(Some(x[..n].to_vec())),
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => unreachable!("feasibility LP has a zero objective"),
        }
    }

    /// Whether some convex combination of vertices dominates `lambda − tol`.
    pub fn contains(&self, lambda: &RateVector, tol: f64) -> Result<bool> {
        Ok(self.feasible_weights(lambda, tol)?.is_some())
    }

    /// Time-sharing weights over vertices whose mean service dominates
    /// `lambda` with the largest common relative margin: the service vector
    /// dominates `s·lambda` for `s` the boundary scale of `lambda`, so every
    /// queue with positive load is served strictly faster than it fills
    /// whenever `lambda` is interior.
    pub fn decompose(&self, lambda: &RateVector) -> Result<Decomposition> {
        self.check_dim(lambda)?;
        let n = self.vertices.len();
        let mut b = if lambda.as_slice().iter().all(|&x| x <= 0.0) {
            // Only the origin vertex carries weight.
            self.vertices.iter().map(|v| if v.decision.is_empty() { 1.0 } else { 0.0 }).collect()
        } else {
            let (scale, x) = self.boundary_lp(lambda.as_slice())?;
            if scale < 1.0 - LP_TOL {
                return Err(Error::ExteriorPoint);
            }
            x[..n].iter().map(|&w| w.max(0.0)).collect::<Vec<f64>>()
        };
        let total: f64 = b.iter().sum();
        b.iter_mut().for_each(|w| *w /= total);
        let l = self.antennas();
        let mut weights = vec![0.0; 1 << l];
        let mut service = vec![0.0; l];
        for (v, &w) in self.vertices.iter().zip(&b) {
            weights[v.decision.mask() as usize] += w;
            for (s, u) in service.iter_mut().zip(v.point.as_slice()) {
                *s += w * u;
            }
        }
        Ok(Decomposition {
            vertex_weights: b,
            policy: StationaryPolicy::new(l, weights)?,
            service: RateVector::new(service)?,
        })
    }

    /// Maximizes `t` subject to `Σ b_n u_n ≥ t·dir`, `Σ b_n = 1`, returning
    /// `t` and the LP solution.
    fn boundary_lp(&self, dir: &[f64]) -> Result<(f64, Vec<f64>)> {
        let rows = self.lp_rows(Some(dir));
        let cols = rows[0].len();
        let mut rhs = vec![0.0; self.antennas()];
        rhs.push(1.0);
        let mut c = vec![0.0; cols];
        c[cols - 1] = -1.0;
        match minimize(&c, &rows, &rhs)? {
            LpOutcome::Optimal { x, objective } => Ok((-objective, x)),
            _ => Err(Error::Unsupported("boundary LP did not reach an optimum".into())),
        }
    }

    /// Largest `s` with `s·direction` inside the region.
    pub fn boundary_scale(&self, direction: &RateVector) -> Result<f64> {
        self.check_dim(direction)?;
        if direction.as_slice().iter().all(|&x| x <= 0.0) {
            return Err(Error::domain("direction must have a positive component"));
        }
        Ok(self.boundary_lp(direction.as_slice())?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(l: usize, p_over_theta: f64) -> StabilityPolytope {
        stability_polytope(&SystemParams::new(l, p_over_theta, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn low_and_high_snr_examples() {
        assert_eq!(poly(3, 0.5).index_set, vec![0, 1]);
        assert_eq!(poly(3, 0.5).vertices.len(), 4);
        assert_eq!(poly(3, 10.0).index_set, vec![0, 1, 2, 3]);
        assert_eq!(poly(3, 10.0).vertices.len(), 8);
        let p = poly(1, 2.0);
        assert_eq!(p.index_set, vec![0, 1]);
        assert_eq!(p.vertices.len(), 2);
        assert_eq!(p.vertices[1].point[0], (-0.5f64).exp());
    }

    #[test]
    fn membership_basics() {
        let p = poly(3, 10.0);
        assert!(p.contains(&RateVector::zeros(3), 1e-9).unwrap());
        for v in &p.vertices {
            assert!(p.contains(&v.point, 1e-9).unwrap());
        }
        let top = p
            .vertices
            .iter()
            .max_by(|a, b| {
                let sa: f64 = a.point.as_slice().iter().sum();
                let sb: f64 = b.point.as_slice().iter().sum();
                sa.partial_cmp(&sb).unwrap()
            })
            .unwrap();
        assert!(!p.contains(&top.point.scaled(1.01).unwrap(), 1e-9).unwrap());
        assert!(p.contains(&RateVector::zeros(2), 0.0).is_err());
    }

    #[test]
    fn decompose_vertex_is_point_mass() {
        let p = poly(3, 10.0);
        for v in &p.vertices {
            let dec = p.decompose(&v.point).unwrap();
            assert!((dec.policy.weight(v.decision) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn decompose_two_queue_interior() {
        let p = poly(2, 10.0);
        assert!(p.index_set.contains(&2));
        let d2 = p.d.get(2);
        let lambda = RateVector::new(vec![0.9 * d2, 0.9 * d2]).unwrap();
        let dec = p.decompose(&lambda).unwrap();
        assert!(dec.service.dominates(&lambda, 1e-9));
        assert!((dec.vertex_weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let out = RateVector::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(p.decompose(&out), Err(Error::ExteriorPoint)));
    }

    #[test]
    fn boundary_along_axis_is_single_rate() {
        let p = poly(3, 5.0);
        let s = p.boundary_scale(&RateVector::new(vec![1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert!((s - p.d.get(1)).abs() < 1e-9);
        let s = p.boundary_scale(&RateVector::new(vec![1.0, 1.0, 1.0]).unwrap()).unwrap();
        assert!((3.0 * s - p.max_sum_rate).abs() < 1e-9);
        assert!(p.boundary_scale(&RateVector::zeros(3)).is_err());
    }

    #[test]
    fn json_export_shape() {
        let j = poly(3, 0.5).to_json();
        assert_eq!(j["index_set"], serde_json::json!([0, 1]));
        assert_eq!(j["vertices"].as_array().unwrap().len(), 4);
        assert_eq!(j["d"].as_array().unwrap().len(), 4);
        assert_eq!(j["params"]["antennas"], 3);
    }

    proptest! {
        #[test]
        fn limits_of_snr(l in 1usize..=5) {
            prop_assert_eq!(poly(l, 1e-2).index_set, vec![0, 1]);
            prop_assert_eq!(poly(l, 1e4).index_set, (0..=l).collect::<Vec<_>>());
        }

        #[test]
        fn decompose_dominates(l in 1usize..=4, pt in 0.1f64..30.0, w in proptest::collection::vec(0.0f64..1.0, 4), scale in 0.0f64..1.0) {
            let p = poly(l, pt);
            let dir = RateVector::new(w[..l].iter().map(|x| x + 1e-3).collect()).unwrap();
            let lambda = dir.scaled(scale * p.boundary_scale(&dir).unwrap()).unwrap();
            let dec = p.decompose(&lambda).unwrap();
            prop_assert!(dec.service.dominates(&lambda, 1e-9));
        }

        #[test]
        fn more_power_enlarges_region(l in 1usize..=4, pt in 0.1f64..30.0, f in 1.0f64..5.0) {
            let small = poly(l, pt);
            let big = poly(l, pt * f);
            for v in &small.vertices {
                prop_assert!(big.contains(&v.point, 1e-9).unwrap());
            }
        }

        #[test]
        fn permuting_queues_permutes_vertices(l in 2usize..=4, pt in 0.1f64..30.0, shift in 1usize..4) {
            let p = poly(l, pt);
            let mut pts: Vec<Vec<f64>> = p.vertices.iter().map(|v| v.point.as_slice().to_vec()).collect();
            let mut rotated: Vec<Vec<f64>> = pts.iter().map(|x| (0..l).map(|i| x[(i + shift) % l]).collect()).collect();
            let key = |a: &Vec<f64>, b: &Vec<f64>| a.partial_cmp(b).unwrap();
            pts.sort_by(key);
            rotated.sort_by(key);
            prop_assert_eq!(pts, rotated);
        }
    }
}
