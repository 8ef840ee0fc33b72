use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Laplace};

use super::simplex::project_to_simplex;
use crate::error::{AuditError, Result};
use crate::seed;

/// Output-perturbation settings: privacy budget `epsilon` and the number of
/// fields generated per sample (`total_length`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivateSamplerConfig {
    pub epsilon: f64,
    pub total_length: usize,
}

impl PrivateSamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(AuditError::invalid(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.total_length == 0 {
            return Err(AuditError::invalid("total_length must be at least 1"));
        }
        Ok(())
    }

    /// Laplace scale `2T / (ε·|V_L|)` for a field with `vocab` tokens.
    pub fn noise_scale(&self, vocab: usize) -> f64 {
        2.0 * self.total_length as f64 / (self.epsilon * vocab as f64)
    }
}

/// Adds `noise` to `probs` and projects back onto the simplex.
pub fn perturb_with_noise(probs: &[f64], noise: &[f64]) -> Vec<f64> {
    let noisy: Vec<f64> = probs.iter().zip(noise).map(|(p, n)| p + n).collect();
    project_to_simplex(&noisy)
}

/// Draws i.i.d. Laplace noise at the configured scale for one field's
/// distribution and projects the noisy vector onto the simplex.
pub(crate) fn perturb_probabilities<R: Rng>(probs: &[f64], cfg: &PrivateSamplerConfig, rng: &mut R) -> Vec<f64> {
    let scale = cfg.noise_scale(probs.len());
    if !(scale > 0.0) || probs.is_empty() {
        return probs.to_vec();
    }
    let laplace = Laplace::new(0.0, scale).expect("positive finite scale");
    let noise: Vec<f64> = probs
        .iter()
        .map(|_| {
            // open interval keeps the inverse CDF finite
            let u: f64 = rng.random_range(f64::EPSILON..1.0);
            laplace.inverse_cdf(u)
        })
        .collect();
    perturb_with_noise(probs, &noise)
}

/// Seeded form of the perturbation for a single distribution.
pub fn private_sample_perturb(probs: &[f64], cfg: &PrivateSamplerConfig, seed: u64) -> Result<Vec<f64>> {
    cfg.validate()?;
    if probs.iter().any(|p| !p.is_finite()) {
        return Err(AuditError::invalid("probabilities must be finite"));
    }
    Ok(perturb_probabilities(probs, cfg, &mut seed::rng(seed)))
}

/// Inverse-CDF draw from a probability vector.
pub(crate) fn sample_index<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1)
}
