//! Deterministic low-discrepancy sampling for the condition checkers.
//!
//! Additive (Kronecker/Weyl) sequences with square-root-of-prime increments:
//! fully deterministic given the seed, which every report echoes.

use serde::{Deserialize, Serialize};

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Low-discrepancy point source on the unit cube.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sampler {
    pub seed: u64,
    dim: usize,
    state: Vec<f64>,
    alphas: Vec<f64>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl Sampler {
    pub fn new(seed: u64, dim: usize) -> Self {
        assert!(dim >= 1 && dim <= PRIMES.len(), "sampler dim out of range");
        let mut s = seed;
        let state = (0..dim)
            .map(|_| (splitmix64(&mut s) >> 11) as f64 / (1u64 << 53) as f64)
            .collect();
        let alphas = PRIMES[..dim]
            .iter()
            .map(|&p| (p as f64).sqrt().fract())
            .collect();
        Sampler {
            seed,
            dim,
            state,
            alphas,
        }
    }

    /// Next point in the unit cube.
    pub fn next_unit(&mut self) -> Vec<f64> {
        for (x, a) in self.state.iter_mut().zip(&self.alphas) {
            *x = (*x + a).fract();
        }
        self.state.clone()
    }

    /// Next point scaled into the given box.
    pub fn next_in(&mut self, lo: &[f64], hi: &[f64]) -> Vec<f64> {
        assert_eq!(lo.len(), self.dim);
        let u = self.next_unit();
        u.iter()
            .zip(lo.iter().zip(hi))
            .map(|(&t, (&a, &b))| a + t * (b - a))
            .collect()
    }
}
