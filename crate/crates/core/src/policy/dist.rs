use crate::engine::ActionId;
use crate::error::{Error, Result};

const NORM_TOLERANCE: f64 = 1e-9;

/// A probability distribution over action ids `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDist(Vec<f64>);

impl ActionDist {
    /// Validates non-negativity and unit mass (within 1e-9).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("empty action distribution"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::domain(format!("invalid probabilities {probs:?}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::domain(format!("probabilities sum to {total}")));
        }
        Ok(Self(probs))
    }

    /// Normalizes non-negative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::domain(format!("cannot normalize weights {weights:?}")));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn one_hot(n: usize, action: ActionId) -> Self {
        let mut v = vec![0.0; n];
        v[action as usize] = 1.0;
        Self(v)
    }

    /// `(1 - epsilon)` on `action`, the rest spread uniformly.
    pub fn epsilon_greedy(n: usize, action: ActionId, epsilon: f64) -> Self {
        let eps = epsilon.clamp(0.0, 1.0);
        let mut v = vec![eps / n as f64; n];
        v[action as usize] += 1.0 - eps;
        Self(v)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Inverse-CDF sample for `u` in `[0, 1)`. Zero-mass actions are never
    /// returned.
    pub fn sample(&self, u: f64) -> ActionId {
        let mut acc = 0.0;
        let mut last = 0;
        for (a, &p) in self.0.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last = a;
            if u < acc {
                return a as ActionId;
            }
        }
        last as ActionId
    }
}
