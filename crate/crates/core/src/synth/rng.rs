//! Portable seeded random source for scene generation.
//!
//! The stream is ChaCha8 seeded through `SeedableRng::seed_from_u64`. Uniform
//! variates take the top 53 bits of one `u64` output scaled by 2⁻⁵³, so they
//! lie in `[0, 1)`. Normal variates use the cosine branch of Box–Muller on two
//! consecutive uniforms `u1, u2`: `sqrt(-2 ln(1 - u1)) · cos(2π u2)`. Both are
//! reproducible bit for bit on any platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct SceneRng {
    inner: ChaCha8Rng,
}

impl SceneRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
