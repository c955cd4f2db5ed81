//! Counter-based 64-bit generator with Box–Muller normals.
//!
//! Value `i` of the stream for seed `s` is the SplitMix64 finalizer applied
//! to `s + (i + 1)·γ` with `γ = 0x9E3779B97F4A7C15`, so any element can be
//! produced independently of the others. Normal sample `2j` and `2j + 1`
//! come from the Box–Muller pair built on uniforms `2j` and `2j + 1`.

use std::f64::consts::PI;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn bits(&self, counter: u64) -> u64 {
        let mut z = self.seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(GAMMA));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `(0, 1]` with 53 random bits.
    pub fn uniform(&self, counter: u64) -> f64 {
        ((self.bits(counter) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal_pair(&self, pair: u64) -> (f64, f64) {
        let r = (-2.0 * self.uniform(2 * pair).ln()).sqrt();
        let theta = 2.0 * PI * self.uniform(2 * pair + 1);
        (r * theta.cos(), r * theta.sin())
    }

    pub fn normal(&self, index: u64) -> f64 {
        let (a, b) = self.normal_pair(index / 2);
        if index.is_multiple_of(2) {
            a
        } else {
            b
        }
    }

    /// The first `n` standard normal samples of the stream.
    pub fn normals(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        for j in 0..n.div_ceil(2) as u64 {
            let (a, b) = self.normal_pair(j);
            out.push(a);
            out.push(b);
        }
        out.truncate(n);
        out
    }
}
