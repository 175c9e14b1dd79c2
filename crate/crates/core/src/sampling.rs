//! Seeded random number generation and weighted index draws.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`, so a
//! seed yields the same stream on every platform. Weighted draws use one
//! uniform variate and an inverse-CDF scan over the cumulative sum in
//! ascending index order.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}

impl RngCore for SeededRng {
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

/// Nonnegative weights plus an eligibility mask.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    active: Vec<bool>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>, active: Vec<bool>) -> Result<Self> {
        if weights.len() != active.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} weights but {} mask entries",
                weights.len(),
                active.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "weight {i} is {} (must be finite and nonnegative)",
                weights[i]
            )));
        }
        Ok(Self { weights, active })
    }

    pub fn all_active(weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        Self::new(weights, vec![true; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }
}

/// Turns weights into probabilities over the active entries. Inactive
/// entries get exactly zero; if every active weight is zero the result is
/// uniform over the active entries.
pub fn normalize(weights: &WeightVector) -> Result<Vec<f64>> {
    let n_active = weights.active.iter().filter(|&&a| a).count();
    if n_active == 0 {
        return Err(Error::NoActiveEntries);
    }
    let total: f64 = weights
        .weights
        .iter()
        .zip(&weights.active)
        .filter(|(_, &a)| a)
        .map(|(w, _)| w)
        .sum();

    let probs = if total > 0.0 {
        weights
            .weights
            .iter()
            .zip(&weights.active)
            .map(|(&w, &a)| if a { w / total } else { 0.0 })
            .collect()
    } else {
        let p = 1.0 / n_active as f64;
        weights
            .active
            .iter()
            .map(|&a| if a { p } else { 0.0 })
            .collect()
    };
    Ok(probs)
}

/// Inverse-CDF draw. Intervals are half-open, so `u == cum[i]` selects the
/// next index. A draw past the final cumulative value (rounding) falls to the
/// last index with positive probability.
pub fn sample_index(probs: &[f64], rng: &mut SeededRng) -> usize {
    let u = rng.next_f64();
    inverse_cdf(probs, u)
}

pub(crate) fn inverse_cdf(probs: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return i;
        }
    }
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .expect("probability vector has no positive entry")
}
