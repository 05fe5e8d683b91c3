use serde::Serialize;

use crate::{Error, Result};

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::domain(format!("{value} is not a probability")))
        }
    }

    /// Clamps rounding spill-over into `[0, 1]`. NaN maps to zero.
    pub(crate) fn saturating(value: f64) -> Self {
        if value.is_nan() {
            Probability(0.0)
        } else {
            Probability(value.clamp(0.0, 1.0))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Regularized upper incomplete gamma function `Γ(m, x) / Γ(m)` for integer
/// shape `m`.
///
/// For integer shape this is the Poisson tail `e^{-x} Σ_{n<m} x^n / n!`,
/// summed exactly. It is also the survival function of a sum of `m` unit
/// exponentials, i.e. of a χ² variable with `m` complex degrees of freedom.
pub fn regularized_upper_gamma(m: u32, x: f64) -> Result<Probability> {
    if m == 0 {
        return Err(Error::domain("incomplete gamma shape must be positive"));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!("incomplete gamma argument {x} < 0")));
    }
    if x == 0.0 {
        return Ok(Probability::ONE);
    }
    if x.is_infinite() {
        return Ok(Probability::ZERO);
    }

    // Well below the mode the tail is close to one; summing the small lower
    // part and subtracting keeps the result accurate to an ulp there.
    if x < m as f64 {
        let ln_fact: f64 = (1..=m).map(|n| (n as f64).ln()).sum();
        let lead = (-x + m as f64 * x.ln() - ln_fact).exp();
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut n = m as f64;
        while term > 1e-17 * sum {
            n += 1.0;
            term *= x / n;
            sum += term;
        }
        return Ok(Probability::saturating(1.0 - lead * sum));
    }

    // Terms x^n/n! overflow long before e^{-x} underflows to a subnormal for
    // moderate x, so large arguments go through log space.
    if x < 500.0 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..m {
            term *= x / n as f64;
            sum += term;
        }
        Ok(Probability::saturating((-x).exp() * sum))
    } else {
        let ln_x = x.ln();
        let mut ln_term = -x;
        let mut total = 0.0;
        for n in 0..m {
            if n > 0 {
                ln_term += ln_x - (n as f64).ln();
            }
            total += ln_term.exp();
        }
        Ok(Probability::saturating(total))
    }
}
