//! Counter-based random streams.
//!
//! Every stream is ChaCha8 keyed by the 64-bit seed (little-endian, padded
//! with 24 zero bytes) with a fixed 64-bit stream id, starting at block 0.
//! Uniforms take the top 53 bits of each 64-bit output; normals come in
//! Box–Muller pairs. The identifier below goes into every run's metadata so
//! other implementations can reproduce the draws.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const ALGORITHM_ID: &str = "chacha8/key=le64(seed)||0^24/stream=id/u53/box-muller-v1";

/// Stream id used for initial-data coefficients.
pub const STREAM_FIELD: u64 = 1;

pub struct CounterRng {
    inner: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A pair of independent standard normals.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }
}
