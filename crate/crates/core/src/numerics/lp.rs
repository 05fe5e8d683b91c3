//! Dense two-phase simplex for small standard-form linear programs
//! `min cᵀx  s.t.  Ax = b, x >= 0`.
//!
//! Pivoting follows Bland's rule so degenerate problems terminate.

use crate::{Error, Result};

/// Feasibility and pivot tolerance.
pub const LP_TOL: f64 = 1e-9;

const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    z: Vec<f64>,
    basis: Vec<usize>,
    rhs: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
        let f = self.z[col];
        if f != 0.0 {
            for (v, pv) in self.z.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.z[col] = 0.0;
        }
        self.basis[r] = col;
    }

    /// Runs Bland-rule simplex over the columns `0..allowed`.
    /// Returns `false` if the problem is unbounded.
    fn optimize(&mut self, allowed: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..allowed).find(|&j| self.z[j] < -LP_TOL) else {
                return Ok(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[col] > LP_TOL {
                    let ratio = row[self.rhs] / row[col];
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - LP_TOL
                                || (ratio <= br + LP_TOL && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, col),
            }
        }
        Err(Error::Unsupported("simplex pivot limit exceeded".into()))
    }
}

/// Solves `min cᵀx` subject to `Ax = b`, `x >= 0`.
///
/// `a` is row-major with one inner vector per constraint.
pub fn minimize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpOutcome> {
    let n = c.len();
    let m = a.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(Error::domain("LP dimensions do not agree"));
    }
    if c.iter().chain(b).chain(a.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::domain("LP data must be finite"));
    }
    let rhs = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, &bi)) in a.iter().zip(b).enumerate() {
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        let mut t = vec![0.0; n + m + 1];
        for (tj, &aj) in t.iter_mut().zip(row) {
            *tj = sign * aj;
        }
        t[n + i] = 1.0;
        t[rhs] = sign * bi;
        rows.push(t);
    }
    let mut z = vec![0.0; n + m + 1];
    for row in &rows {
        for j in 0..n {
            z[j] -= row[j];
        }
        z[rhs] -= row[rhs];
    }
    let mut tab = Tableau { rows, z, basis: (n..n + m).collect(), rhs };

    // Phase one: drive the artificial variables to zero.
    tab.optimize(n + m)?;
    let scale = 1.0 + b.iter().map(|v| v.abs()).sum::<f64>();
    if -tab.z[rhs] > LP_TOL * scale {
        return Ok(LpOutcome::Infeasible);
    }
    let mut r = 0;
    while r < tab.rows.len() {
        if tab.basis[r] >= n {
            match (0..n).find(|&j| tab.rows[r][j].abs() > LP_TOL) {
                Some(col) => tab.pivot(r, col),
                None => {
                    // Redundant constraint.
                    tab.rows.remove(r);
                    tab.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase two on the original objective.
    let mut z = vec![0.0; n + m + 1];
    z[..n].copy_from_slice(c);
    for (row, &bj) in tab.rows.iter().zip(&tab.basis) {
        let cb = c[bj];
        if cb != 0.0 {
            for j in 0..n {
                z[j] -= cb * row[j];
            }
            z[rhs] -= cb * row[rhs];
        }
    }
    tab.z = z;
    if !tab.optimize(n)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for (row, &bj) in tab.rows.iter().zip(&tab.basis) {
        x[bj] = row[rhs].max(0.0);
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpOutcome::Optimal { x, objective })
}
