use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

/// Seeded, splittable random stream.
///
/// Backed by ChaCha12 so that `(seed, stream)` pairs address independent
/// sequences: experiments derive one stream per purpose (arrivals, channels,
/// quantization, ...) and per grid point, and identical seeds reproduce runs
/// bit for bit regardless of how work is spread across threads.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        RngStream { inner }
    }

    /// Stream `(seed, stream)` with the stream index further split by `index`,
    /// e.g. one per sweep point.
    pub fn derive(seed: u64, stream: u64, index: u64) -> Self {
        Self::with_stream(seed, stream.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index)
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Unit-mean exponential.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        Exp1.sample(&mut self.inner)
    }

    /// Circularly-symmetric complex Gaussian with unit variance.
    #[inline]
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let re: f64 = self.standard_normal();
        let im: f64 = self.standard_normal();
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Uniform integer in `0..n`.
    #[inline]
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Draws an `n`-vector of i.i.d. CN(0, 1) entries.
pub fn sample_complex_gaussian_vector(n: usize, rng: &mut RngStream) -> Vec<Complex64> {
    (0..n).map(|_| rng.complex_gaussian()).collect()
}
