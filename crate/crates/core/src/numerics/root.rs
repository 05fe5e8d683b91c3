use crate::{Error, Result};

const MAX_ITER: usize = 400;

/// Finds a root of `f` on `[lo, hi]`, which must bracket a sign change.
///
/// Alternates a regula-falsi step with a bisection step, so the bracket at
/// least halves every two iterations whatever the shape of `f`. Stops once
/// `|f(r)| <= tol` or the bracket is narrower than `tol`.
pub fn find_root_bracketed<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::domain(format!(
            "bad bracket [{lo}, {hi}] or tolerance {tol}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::Bracket { lo, hi });
    }

    for iter in 0..MAX_ITER {
        let secant = iter % 2 == 0;
        let mut x = if secant {
            b - fb * (b - a) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx.abs() <= tol {
            return Ok(x);
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if b - a <= tol {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}
