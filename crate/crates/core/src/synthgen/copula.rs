use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::private::{perturb_probabilities, sample_index, PrivateSamplerConfig};
use crate::data::{Column, ColumnKind, DatasetSchema, Origin, TabularDataset};
use crate::error::{AuditError, Result};
use crate::seed;

/// Shrinkage toward the identity applied to the fitted latent correlation.
pub const CORRELATION_SHRINKAGE: f64 = 1e-3;
const BLOCK_ROWS: usize = 512;
const U_CLAMP: f64 = 1e-15;

/// Empirical marginal of one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Marginal {
    Continuous {
        sorted: Vec<f64>,
    },
    Categorical {
        categories: Vec<String>,
        probs: Vec<f64>,
    },
    /// Identifier column; regenerated as row labels.
    Identifier,
}

impl Marginal {
    fn fit(column: &Column) -> Marginal {
        match column {
            Column::Continuous(v) => {
                let mut sorted = v.clone();
                sorted.sort_by(f64::total_cmp);
                Marginal::Continuous { sorted }
            }
            Column::Categorical(v) => {
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for s in v {
                    *counts.entry(s).or_default() += 1;
                }
                let n = v.len() as f64;
                Marginal::Categorical {
                    categories: counts.keys().map(|s| s.to_string()).collect(),
                    probs: counts.values().map(|&c| c as f64 / n).collect(),
                }
            }
        }
    }

    pub fn is_degenerate(&self) -> bool {
        match self {
            Marginal::Continuous { sorted } => sorted.first() == sorted.last(),
            Marginal::Categorical { categories, .. } => categories.len() == 1,
            Marginal::Identifier => true,
        }
    }

    /// Linear interpolation of the empirical quantile function.
    fn continuous_quantile(sorted: &[f64], u: f64) -> f64 {
        let pos = u.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
        let i = (pos.floor() as usize).min(sorted.len() - 1);
        let frac = pos - i as f64;
        if frac == 0.0 || i + 1 == sorted.len() {
            sorted[i]
        } else {
            sorted[i] + frac * (sorted[i + 1] - sorted[i])
        }
    }

    fn category_at(probs: &[f64], u: f64) -> usize {
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    /// Token boundaries in probability space: category masses, or `bins`
    /// equal-mass quantile bins for continuous columns.
    fn token_bounds(&self, bins: usize) -> Vec<f64> {
        match self {
            Marginal::Categorical { probs, .. } => {
                let mut b = vec![0.0];
                let mut acc = 0.0;
                for p in &probs[..probs.len() - 1] {
                    acc += p;
                    b.push(acc);
                }
                b.push(1.0);
                b
            }
            Marginal::Continuous { .. } if !self.is_degenerate() => {
                (0..=bins).map(|k| k as f64 / bins as f64).collect()
            }
            _ => vec![0.0, 1.0],
        }
    }
}

/// Gaussian copula over the non-id columns: empirical marginals plus the
/// correlation of their normal scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianCopulaModel {
    pub schema: DatasetSchema,
    /// One per schema column.
    pub marginals: Vec<Marginal>,
    /// Schema column of each latent dimension.
    pub latent_columns: Vec<usize>,
    /// Latent correlation, row-major.
    pub correlation: Vec<Vec<f64>>,
    pub seed: u64,
}

fn std_normal() -> Normal {
    Normal::standard()
}

fn phi_inv(u: f64) -> f64 {
    std_normal().inverse_cdf(u.clamp(U_CLAMP, 1.0 - U_CLAMP))
}

/// Mid-ranks (1-based, ties averaged).
fn mid_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

impl GaussianCopulaModel {
    pub fn fit(train: &TabularDataset, seed: u64) -> Result<Self> {
        let n = train.n_rows();
        if n < 10 {
            return Err(AuditError::TooFewRows {
                what: "gaussian copula fit",
                need: 10,
                got: n,
            });
        }
        let schema = train.schema().clone();
        let marginals: Vec<Marginal> = (0..schema.columns.len())
            .map(|j| {
                if schema.is_id(j) {
                    Marginal::Identifier
                } else {
                    Marginal::fit(train.column(j))
                }
            })
            .collect();
        let latent_columns = schema.metric_columns();
        let clamp = 0.5 / n as f64;

        let scores: Vec<Vec<f64>> = latent_columns
            .iter()
            .map(|&j| {
                if marginals[j].is_degenerate() {
                    return vec![0.0; n];
                }
                match (train.column(j), &marginals[j]) {
                    (Column::Continuous(v), _) => {
                        mid_ranks(v).into_iter().map(|r| phi_inv(r / (n + 1) as f64)).collect()
                    }
                    (Column::Categorical(v), Marginal::Categorical { categories, probs }) => {
                        let mut lower = vec![0.0; probs.len()];
                        for c in 1..probs.len() {
                            lower[c] = lower[c - 1] + probs[c - 1];
                        }
                        let mut rng = seed::rng(seed::derive(seed, &[seed::tag("jitter"), j as u64]));
                        v.iter()
                            .map(|s| {
                                let c = categories.binary_search(s).expect("category seen in fit");
                                let u = lower[c] + rng.random::<f64>() * probs[c];
                                phi_inv(u.clamp(clamp, 1.0 - clamp))
                            })
                            .collect()
                    }
                    _ => unreachable!("marginal kind follows the column kind"),
                }
            })
            .collect();

        let p = scores.len();
        let stats: Vec<(f64, f64)> = scores
            .iter()
            .map(|s| {
                let mean = s.iter().sum::<f64>() / n as f64;
                let sd = (s.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64).sqrt();
                (mean, sd)
            })
            .collect();
        let mut correlation = vec![vec![0.0; p]; p];
        for a in 0..p {
            correlation[a][a] = 1.0;
            for b in a + 1..p {
                let (ma, sa) = stats[a];
                let (mb, sb) = stats[b];
                let r = if sa > 0.0 && sb > 0.0 {
                    let cov = scores[a]
                        .iter()
                        .zip(&scores[b])
                        .map(|(x, y)| (x - ma) * (y - mb))
                        .sum::<f64>()
                        / n as f64;
                    (cov / (sa * sb)).clamp(-1.0, 1.0)
                } else {
                    0.0
                };
                let shrunk = (1.0 - CORRELATION_SHRINKAGE) * r;
                correlation[a][b] = shrunk;
                correlation[b][a] = shrunk;
            }
        }
        Ok(GaussianCopulaModel {
            schema,
            marginals,
            latent_columns,
            correlation,
            seed,
        })
    }

    fn cholesky(&self) -> Result<DMatrix<f64>> {
        let p = self.latent_columns.len();
        let r = DMatrix::from_fn(p, p, |a, b| self.correlation[a][b]);
        r.cholesky()
            .map(|c| c.l())
            .ok_or_else(|| AuditError::Numerical("latent correlation is not positive definite".into()))
    }

    /// Draws `n_rows` rows; blocks of rows are generated in parallel from
    /// seeds derived from `(seed, block)`.
    pub fn sample(&self, n_rows: usize, seed: u64) -> Result<TabularDataset> {
        let chol = self.cholesky()?;
        let p = self.latent_columns.len();
        self.sample_blocks(n_rows, seed, |rng, out: &mut Vec<f64>| {
            let e: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
            let normal = std_normal();
            for k in 0..p {
                let z: f64 = (0..=k).map(|m| chol[(k, m)] * e[m]).sum();
                out.push(normal.cdf(z));
            }
            Ok(())
        })
    }

    /// Sequential sampler for the differentially-private mode: each field's
    /// token distribution (categories, or `bins` equal-mass quantile bins of
    /// a continuous column) conditional on the fields drawn before it is
    /// perturbed with Laplace noise and projected back onto the simplex
    /// before the token is drawn.
    pub fn sample_private(&self, n_rows: usize, epsilon: f64, bins: usize, seed: u64) -> Result<TabularDataset> {
        if bins < 2 {
            return Err(AuditError::invalid("private sampling needs at least 2 bins"));
        }
        let cfg = PrivateSamplerConfig {
            epsilon,
            total_length: self.latent_columns.len(),
        };
        cfg.validate()?;
        let chol = self.cholesky()?;
        let bounds: Vec<Vec<f64>> = self
            .latent_columns
            .iter()
            .map(|&j| self.marginals[j].token_bounds(bins))
            .collect();
        let z_bounds: Vec<Vec<f64>> = bounds
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&u| match u {
                        u if u <= 0.0 => f64::NEG_INFINITY,
                        u if u >= 1.0 => f64::INFINITY,
                        u => std_normal().inverse_cdf(u),
                    })
                    .collect()
            })
            .collect();
        let p = self.latent_columns.len();
        self.sample_blocks(n_rows, seed, |rng, out: &mut Vec<f64>| {
            let normal = std_normal();
            let mut e = vec![0.0; p];
            for k in 0..p {
                let mu: f64 = (0..k).map(|m| chol[(k, m)] * e[m]).sum();
                let sigma = chol[(k, k)];
                let cdf: Vec<f64> = z_bounds[k]
                    .iter()
                    .map(|&zb| match zb {
                        f64::NEG_INFINITY => 0.0,
                        f64::INFINITY => 1.0,
                        zb => normal.cdf((zb - mu) / sigma),
                    })
                    .collect();
                let mut probs: Vec<f64> = cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
                let total: f64 = probs.iter().sum();
                if total > 0.0 {
                    probs.iter_mut().for_each(|x| *x /= total);
                } else {
                    probs.iter_mut().for_each(|x| *x = 1.0 / bounds[k].len() as f64);
                }
                let noisy = perturb_probabilities(&probs, &cfg, rng);
                let t = sample_index(&noisy, rng);
                let w = cdf[t] + rng.random::<f64>() * (cdf[t + 1] - cdf[t]);
                e[k] = normal.inverse_cdf(w.clamp(U_CLAMP, 1.0 - U_CLAMP));
                let u = normal.cdf(mu + sigma * e[k]);
                // keep the value inside the drawn token's interval
                let (lo, hi) = (bounds[k][t], bounds[k][t + 1]);
                out.push(if u > lo && u < hi { u } else { (lo + hi) / 2.0 });
            }
            Ok(())
        })
    }

    /// Runs `draw_row` (which appends one probability-space value per latent
    /// dimension) over blocks of rows and inverts the marginals.
    fn sample_blocks<F>(&self, n_rows: usize, seed: u64, draw_row: F) -> Result<TabularDataset>
    where
        F: Fn(&mut rand_chacha::ChaCha8Rng, &mut Vec<f64>) -> Result<()> + Sync,
    {
        if n_rows == 0 {
            return Err(AuditError::invalid("n_rows must be at least 1"));
        }
        let p = self.latent_columns.len();
        let n_blocks = n_rows.div_ceil(BLOCK_ROWS);
        let blocks: Vec<Vec<f64>> = (0..n_blocks)
            .into_par_iter()
            .map(|b| {
                let rows = BLOCK_ROWS.min(n_rows - b * BLOCK_ROWS);
                let mut rng = seed::rng(seed::derive(seed, &[seed::tag("block"), b as u64]));
                let mut out = Vec::with_capacity(rows * p);
                for _ in 0..rows {
                    draw_row(&mut rng, &mut out)?;
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let u: Vec<f64> = blocks.concat();

        let mut columns = Vec::with_capacity(self.schema.columns.len());
        for (j, spec) in self.schema.columns.iter().enumerate() {
            let col = match &self.marginals[j] {
                Marginal::Identifier => match spec.kind {
                    ColumnKind::Categorical => Column::Categorical((0..n_rows).map(|i| format!("syn-{i}")).collect()),
                    ColumnKind::Continuous => Column::Continuous((0..n_rows).map(|i| i as f64).collect()),
                },
                marginal => {
                    let k = self
                        .latent_columns
                        .iter()
                        .position(|&c| c == j)
                        .expect("non-id column is latent");
                    let values = (0..n_rows).map(|i| u[i * p + k]);
                    match marginal {
                        Marginal::Continuous { sorted } => {
                            Column::Continuous(values.map(|x| Marginal::continuous_quantile(sorted, x)).collect())
                        }
                        Marginal::Categorical { categories, probs } => Column::Categorical(
                            values
                                .map(|x| categories[Marginal::category_at(probs, x)].clone())
                                .collect(),
                        ),
                        Marginal::Identifier => unreachable!(),
                    }
                }
            };
            columns.push(col);
        }
        TabularDataset::from_columns(
            self.schema.clone(),
            columns,
            Origin::Synthetic {
                model_id: "gaussian_copula".into(),
                fold_id: 0,
                checkpoint_id: 0,
            },
        )
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|source| AuditError::Json {
            context: "copula model".into(),
            source,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: GaussianCopulaModel = serde_json::from_str(text).map_err(|source| AuditError::Json {
            context: "copula model".into(),
            source,
        })?;
        model.schema.validate()?;
        if model.marginals.len() != model.schema.columns.len() {
            return Err(AuditError::DimensionMismatch {
                expected: model.schema.columns.len(),
                got: model.marginals.len(),
            });
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|source| AuditError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| AuditError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

pub fn fit_gaussian_copula(train: &TabularDataset, seed: u64) -> Result<GaussianCopulaModel> {
    GaussianCopulaModel::fit(train, seed)
}

pub fn sample_gaussian_copula(model: &GaussianCopulaModel, n_rows: usize, seed: u64) -> Result<TabularDataset> {
    model.sample(n_rows, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ColumnSpec, ProtectedSpec};

    fn schema(cols: &[(&str, ColumnKind)]) -> DatasetSchema {
        let mut columns: Vec<ColumnSpec> = cols
            .iter()
            .map(|(n, k)| ColumnSpec {
                name: n.to_string(),
                kind: *k,
            })
            .collect();
        columns.push(ColumnSpec {
            name: "y".into(),
            kind: ColumnKind::Categorical,
        });
        columns.push(ColumnSpec {
            name: "g".into(),
            kind: ColumnKind::Categorical,
        });
        DatasetSchema::new(
            columns,
            "y",
            ProtectedSpec {
                column: "g".into(),
                privileged_value: "a".into(),
            },
            vec![],
        )
        .unwrap()
    }

    fn dataset(cont: Vec<Vec<f64>>, seed: u64) -> TabularDataset {
        let n = cont[0].len();
        let names: Vec<String> = (0..cont.len()).map(|i| format!("x{i}")).collect();
        let sch = schema(
            &names
                .iter()
                .map(|s| (s.as_str(), ColumnKind::Continuous))
                .collect::<Vec<_>>(),
        );
        let mut rng = seed::rng(seed);
        let mut cols: Vec<Column> = cont.into_iter().map(Column::Continuous).collect();
        cols.push(Column::Categorical(
            (0..n)
                .map(|_| if rng.random::<bool>() { "p" } else { "q" }.into())
                .collect(),
        ));
        cols.push(Column::Categorical(
            (0..n)
                .map(|_| if rng.random::<f64>() < 0.3 { "a" } else { "b" }.into())
                .collect(),
        ));
        TabularDataset::from_columns(sch, cols, Origin::Real).unwrap()
    }

    fn uniform(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = seed::rng(seed);
        (0..n).map(|_| rng.random::<f64>()).collect()
    }

    #[test]
    fn independent_columns_have_small_correlation() {
        let data = dataset(vec![uniform(5000, 1), uniform(5000, 2)], 3);
        let m = fit_gaussian_copula(&data, 0).unwrap();
        for a in 0..m.correlation.len() {
            assert_eq!(m.correlation[a][a], 1.0);
            for b in 0..m.correlation.len() {
                assert_eq!(m.correlation[a][b], m.correlation[b][a]);
                if a != b {
                    assert!(m.correlation[a][b].abs() <= 0.08, "{}", m.correlation[a][b]);
                }
            }
        }
    }

    #[test]
    fn comonotone_pair_is_strongly_correlated() {
        let x = uniform(500, 4);
        let y: Vec<f64> = x.iter().map(|v| v.powi(3) * 10.0).collect();
        let m = fit_gaussian_copula(&dataset(vec![x, y], 5), 0).unwrap();
        assert!(m.correlation[0][1] >= 0.95);
    }

    /// Two-sample Kolmogorov–Smirnov statistic.
    fn ks(a: &[f64], b: &[f64]) -> f64 {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0, 0, 0.0f64);
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        d
    }

    #[test]
    fn sampled_marginal_passes_ks() {
        let mut rng = seed::rng(6);
        let x: Vec<f64> = (0..5000).map(|_| rng.sample::<f64, _>(StandardNormal).exp()).collect();
        let data = dataset(vec![x.clone(), uniform(5000, 7)], 8);
        let m = fit_gaussian_copula(&data, 1).unwrap();
        let s = m.sample(5000, 2).unwrap();
        let d = ks(&x, s.column(0).as_continuous().unwrap());
        // critical value at level 0.01: 1.628 · sqrt(2/5000)
        assert!(d < 1.628 * (2.0f64 / 5000.0).sqrt(), "{d}");
        assert_eq!(s, m.sample(5000, 2).unwrap());
    }

    #[test]
    fn constant_column_and_category_support() {
        let data = dataset(vec![vec![3.5; 40], uniform(40, 9)], 10);
        let m = fit_gaussian_copula(&data, 0).unwrap();
        let s = m.sample(100, 1).unwrap();
        assert!(s.column(0).as_continuous().unwrap().iter().all(|v| *v == 3.5));
        assert!(s
            .column(2)
            .as_categorical()
            .unwrap()
            .iter()
            .all(|v| v == "p" || v == "q"));
        let p = m.sample_private(100, 1.0, 10, 1).unwrap();
        assert!(p.column(0).as_continuous().unwrap().iter().all(|v| *v == 3.5));
        assert!(p
            .column(3)
            .as_categorical()
            .unwrap()
            .iter()
            .all(|v| v == "a" || v == "b"));
        let back = GaussianCopulaModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn private_sampler_tracks_marginals_at_large_epsilon() {
        let data = dataset(vec![uniform(2000, 11), uniform(2000, 12)], 13);
        let m = fit_gaussian_copula(&data, 0).unwrap();
        let s = m.sample_private(2000, 1e6, 10, 3).unwrap();
        let d = ks(
            data.column(0).as_continuous().unwrap(),
            s.column(0).as_continuous().unwrap(),
        );
        assert!(d < 0.06, "{d}");
        let share = |d: &TabularDataset| {
            d.column(3)
                .as_categorical()
                .unwrap()
                .iter()
                .filter(|v| *v == "a")
                .count() as f64
                / d.n_rows() as f64
        };
        assert!((share(&data) - share(&s)).abs() < 0.04);
    }
}
