use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::private::{perturb_probabilities, sample_index, PrivateSamplerConfig};
use crate::data::TokenMatrix;
use crate::error::{AuditError, Result};
use crate::seed;

/// Samples every field independently from its token frequencies. Serves as
/// the simplest categorical generator the private sampler can wrap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependentSampler {
    /// Per-field token distribution.
    pub probs: Vec<Vec<f64>>,
}

impl IndependentSampler {
    /// Tokens at or above a field's vocabulary size (unseen markers) are not
    /// counted.
    pub fn fit(tokens: &TokenMatrix, vocab_sizes: &[usize]) -> Result<Self> {
        if tokens.ncols() != vocab_sizes.len() {
            return Err(AuditError::DimensionMismatch {
                expected: vocab_sizes.len(),
                got: tokens.ncols(),
            });
        }
        let probs = vocab_sizes
            .iter()
            .enumerate()
            .map(|(f, &v)| {
                let mut counts = vec![0usize; v];
                for &t in tokens.column(f) {
                    if let Some(c) = counts.get_mut(t as usize) {
                        *c += 1;
                    }
                }
                let total: usize = counts.iter().sum();
                if total == 0 {
                    return Err(AuditError::invalid(format!("field {f} has no in-vocabulary tokens")));
                }
                Ok(counts.into_iter().map(|c| c as f64 / total as f64).collect())
            })
            .collect::<Result<_>>()?;
        Ok(IndependentSampler { probs })
    }

    /// Draws `n` rows. With `private`, each field's distribution is freshly
    /// perturbed before every draw.
    pub fn sample(&self, n: usize, private: Option<&PrivateSamplerConfig>, seed: u64) -> Result<TokenMatrix> {
        if let Some(cfg) = private {
            cfg.validate()?;
        }
        let mut rng = seed::rng(seed);
        let mut out = Array2::zeros((n, self.probs.len()));
        for i in 0..n {
            for (f, p) in self.probs.iter().enumerate() {
                let t = match private {
                    Some(cfg) => sample_index(&perturb_probabilities(p, cfg, &mut rng), &mut rng),
                    None => sample_index(p, &mut rng),
                };
                out[(i, f)] = t as u32;
            }
        }
        Ok(out)
    }
}
