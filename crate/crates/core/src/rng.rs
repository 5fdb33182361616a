//! Counter-based randomness.
//!
//! Every draw is addressed by `(seed, stream, index)`: the ChaCha8 keystream
//! for `seed` is positioned at stream `stream` and word offset
//! `index * words_per_index`. Draws are therefore independent of evaluation
//! order and of how work is split across threads.

use num_complex::Complex64;
use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Stream identifiers used across the crate. Distinct purposes never share
/// keystream.
pub mod streams {
    pub const SPHERE: u64 = 1;
    pub const BALL_REJECTION: u64 = 2;
    pub const POLY_COEFFS: u64 = 3;
    pub const TEST_POINTS: u64 = 4;
    pub const DIRECTIONS: u64 = 5;
    pub const MAX_SEARCH: u64 = 6;
}

pub struct CounterRng {
    inner: ChaCha8Rng,
}

impl CounterRng {
    pub fn at(seed: u64, stream: u64, index: u64, words_per_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        inner.set_word_pos(u128::from(index) * u128::from(words_per_index));
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `(0, 1]`, 53 bits.
    pub fn uniform_open0(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard complex Gaussian (real and imaginary parts `N(0,1)`), via
    /// Box–Muller so that each draw consumes exactly two `u64`.
    pub fn complex_normal(&mut self) -> Complex64 {
        let r = (-2.0 * self.uniform_open0().ln()).sqrt();
        let theta = TAU * self.uniform();
        Complex64::from_polar(r, theta)
    }
}

/// Words (32-bit) consumed by one complex normal.
pub const WORDS_PER_COMPLEX_NORMAL: u64 = 4;

/// Uniform point on the unit sphere of `C^n` for sample `index`.
pub fn sphere_point(seed: u64, stream: u64, index: u64, n: usize) -> Vec<Complex64> {
    let mut rng = CounterRng::at(seed, stream, index, WORDS_PER_COMPLEX_NORMAL * n as u64);
    let mut v: Vec<Complex64> = (0..n).map(|_| rng.complex_normal()).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut v {
        *c /= norm;
    }
    v
}

/// Uniform point in the complex unit disk.
pub fn disk_point(rng: &mut CounterRng) -> Complex64 {
    let r = rng.uniform().sqrt();
    Complex64::from_polar(r, TAU * rng.uniform())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_addressable() {
        let a = sphere_point(42, streams::SPHERE, 17, 3);
        let b = sphere_point(42, streams::SPHERE, 17, 3);
        assert_eq!(a, b);
        let c = sphere_point(42, streams::SPHERE, 18, 3);
        assert_ne!(a, c);
        let d = sphere_point(43, streams::SPHERE, 17, 3);
        assert_ne!(a, d);
        let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sequential_matches_random_access() {
        let mut seq = CounterRng::at(7, 9, 0, 2);
        let first: Vec<u64> = (0..6).map(|_| seq.next_u64()).collect();
        for (i, &v) in first.iter().enumerate() {
            let mut r = CounterRng::at(7, 9, i as u64, 2);
            assert_eq!(r.next_u64(), v);
        }
    }

    #[test]
    fn uniform_moments() {
        let mut r = CounterRng::at(1, 1, 0, 0);
        let n = 100_000;
        let mean = (0..n).map(|_| r.uniform()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005);
    }
}
