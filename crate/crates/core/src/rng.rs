//! Seeded pseudo-random sampling for scans and property tests.
//!
//! The generator is splitmix64: 64 bits of state advanced by the golden-ratio
//! increment and finalised with two xor-shift multiplies. It is small enough
//! to restate in a report or port to another language, which keeps sampled
//! scans reproducible bit-for-bit across implementations. Per-trial streams
//! are derived as `seed + index * GOLDEN` so trials can run in any order.

use crate::exact::GaussianRational;
use num_complex::Complex64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent stream for trial `index` of a scan seeded with `seed`.
    pub fn for_trial(seed: u64, index: u64) -> Self {
        Self::new(seed.wrapping_add(index.wrapping_mul(GOLDEN)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, n)` by reduction; fine for the small ranges used here.
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }

    /// Uniform integer in `[lo, hi]` inclusive.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.next_below((hi - lo + 1) as u64) as i64
    }

    /// Uniform in `[0, 1)` with 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Rational with numerator in `[-bound, bound]` and denominator in
    /// `[1, bound]`; the sampling recipe scans rely on.
    pub fn rational(&mut self, bound: i64) -> (i64, i64) {
        let num = self.int_in(-bound, bound);
        let den = self.int_in(1, bound);
        (num, den)
    }

    /// Random Gaussian rational: independent `rational(bound)` draws for the
    /// real and imaginary parts, real part first.
    pub fn gaussian_rational(&mut self, bound: i64) -> GaussianRational {
        let (rn, rd) = self.rational(bound);
        let (in_, id) = self.rational(bound);
        let re = GaussianRational::from_ratio(rn, rd);
        let im = GaussianRational::from_ratio(in_, id);
        re + GaussianRational::i() * im
    }

    /// Point in the unit disc (rejection sampling).
    pub fn unit_disc(&mut self) -> Complex64 {
        loop {
            let x = 2.0 * self.next_f64() - 1.0;
            let y = 2.0 * self.next_f64() - 1.0;
            if x * x + y * y <= 1.0 {
                return Complex64::new(x, y);
            }
        }
    }
}
