//! Empirical distributions and goodness-of-fit statistics used to compare
//! Monte-Carlo output against analytic laws.

use serde::Serialize;

/// Sorted sample with empirical-CDF queries.
#[derive(Debug, Clone, Default)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    /// NaNs are dropped.
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.retain(|x| !x.is_nan());
        samples.sort_by(f64::total_cmp);
        EmpiricalCdf { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        self.sorted.partition_point(|&s| s <= x) as f64 / self.sorted.len() as f64
    }

    pub fn mean(&self) -> f64 {
        if self.sorted.is_empty() {
            return f64::NAN;
        }
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }

    /// One-sample Kolmogorov-Smirnov distance to a continuous CDF.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                let lo = i as f64 / n;
                let hi = (i + 1) as f64 / n;
                (f - lo).abs().max((hi - f).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Two-sample Kolmogorov-Smirnov distance.
    pub fn ks_distance_two_sample(&self, other: &EmpiricalCdf) -> f64 {
        let (a, b) = (&self.sorted, &other.sorted);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j) = (0, 0);
        let mut d: f64 = 0.0;
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / na - j as f64 / nb).abs());
        }
        d
    }

    /// Asymptotic p-value of the two-sample KS test against `other`.
    pub fn ks_two_sample_pvalue(&self, other: &EmpiricalCdf) -> f64 {
        let d = self.ks_distance_two_sample(other);
        let (na, nb) = (self.len() as f64, other.len() as f64);
        let ne = na * nb / (na + nb);
        kolmogorov_survival((ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d)
    }
}

/// Survival function of the Kolmogorov distribution,
/// `2 Σ_{k>=1} (-1)^{k-1} exp(-2 k² t²)`.
pub fn kolmogorov_survival(t: f64) -> f64 {
    if t < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * t * t).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Mean with a standard error from non-overlapping batch means, for
/// autocorrelated series such as queue lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BatchEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub batches: usize,
}

impl BatchEstimate {
    pub fn from_batch_means(batch_means: &[f64]) -> Self {
        let b = batch_means.len();
        if b == 0 {
            return BatchEstimate { mean: f64::NAN, std_error: f64::NAN, batches: 0 };
        }
        let mean = batch_means.iter().sum::<f64>() / b as f64;
        let std_error = if b > 1 {
            let var = batch_means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b - 1) as f64;
            (var / b as f64).sqrt()
        } else {
            f64::NAN
        };
        BatchEstimate { mean, std_error, batches: b }
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
