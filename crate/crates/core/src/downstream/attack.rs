use ndarray::{Array2, ArrayView2};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classifier::Classifier;
use crate::data::{FieldQuantizer, Quantizer, TokenMatrix};
use crate::embedding::{EmbedBlock, Embedder};
use crate::error::{AuditError, Result};
use crate::{seed, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttackConfig {
    /// Same-field tokens tried per visited field.
    pub candidates: usize,
    /// Maximum fraction of attackable fields that may be substituted.
    pub budget: f64,
    pub seed: u64,
}

impl Default for AttackConfig {
    fn default() -> Self {
        AttackConfig {
            candidates: 5,
            budget: 0.3,
            seed: 0,
        }
    }
}

impl AttackConfig {
    pub fn validate(&self) -> Result<()> {
        if self.candidates == 0 || !(self.budget >= 0.0 && self.budget <= 1.0) {
            return Err(AuditError::invalid(
                "attack needs candidates ≥ 1 and a budget in [0, 1]",
            ));
        }
        Ok(())
    }

    /// `⌊budget · fields⌋`.
    pub fn max_substitutions(&self, fields: usize) -> usize {
        (self.budget * fields as f64 + 1e-9).floor() as usize
    }
}

struct FieldFeatures<S> {
    field: usize,
    offset: usize,
    /// Feature values written for each token of the field.
    table: Vec<Vec<S>>,
}

/// Maps token rows straight to embedder features (tokens decoded to bin
/// centers or categories, then embedded).
pub struct TokenFeaturizer<S> {
    dim: usize,
    fields: Vec<FieldFeatures<S>>,
}

impl<S: Scalar> TokenFeaturizer<S> {
    pub fn new(quantizer: &Quantizer, embedder: &Embedder) -> Result<Self> {
        let mut fields = Vec::new();
        let mut dim = 0;
        for (block, offset) in embedder.blocks.iter().zip(embedder.offsets()) {
            let column = match block {
                EmbedBlock::Numeric { column, .. } | EmbedBlock::OneHot { column, .. } => *column,
            };
            let field = quantizer
                .field_of_column(column)
                .ok_or_else(|| AuditError::invalid("embedded column is not quantized"))?;
            let q = &quantizer.fields[field].quantizer;
            let table: Vec<Vec<S>> = (0..q.vocab_size() as u32)
                .map(|t| match block {
                    EmbedBlock::Numeric { mean, std, .. } => {
                        let c = q.bin_center(t).unwrap_or(*mean);
                        vec![S::lit(if *std > 0.0 { (c - mean) / std } else { 0.0 })]
                    }
                    EmbedBlock::OneHot { categories, .. } => {
                        let mut v = vec![S::zero(); categories.len()];
                        if let Some(k) = q
                            .category(t)
                            .and_then(|c| categories.binary_search_by(|x| x.as_str().cmp(c)).ok())
                        {
                            v[k] = S::one();
                        }
                        v
                    }
                })
                .collect();
            dim = dim.max(offset + table.first().map_or(0, Vec::len));
            fields.push(FieldFeatures { field, offset, table });
        }
        Ok(TokenFeaturizer { dim, fields })
    }

    /// Quantized fields that feed the classifier.
    pub fn attackable_fields(&self) -> Vec<usize> {
        self.fields.iter().map(|f| f.field).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn write_row(&self, tokens: &[u32], out: &mut [S]) {
        for f in &self.fields {
            let v = &f.table[tokens[f.field] as usize];
            out[f.offset..f.offset + v.len()].copy_from_slice(v);
        }
    }

    pub fn featurize(&self, tokens: ArrayView2<u32>) -> Array2<S> {
        let mut out = Array2::from_elem((tokens.nrows(), self.dim), S::zero());
        for (i, row) in tokens.rows().into_iter().enumerate() {
            let row = row.to_vec();
            self.write_row(&row, out.row_mut(i).as_slice_mut().expect("standard layout"));
        }
        out
    }
}

/// Token vectors whose cosine similarity picks substitution candidates.
/// Categorical tokens use their co-occurrence frequencies with every other
/// field's tokens on real training rows; numeric tokens use
/// `(1, standardized bin center)`; the unseen token is the zero vector.
#[derive(Debug, Clone)]
pub struct TokenEmbeddings {
    pub vectors: Vec<Vec<Vec<f64>>>,
    unseen: Vec<Option<u32>>,
}

impl TokenEmbeddings {
    pub fn fit(quantizer: &Quantizer, real_train: ArrayView2<u32>) -> Self {
        let vocab = quantizer.vocab_sizes();
        let offsets: Vec<usize> = vocab
            .iter()
            .scan(0, |acc, &v| {
                let o = *acc;
                *acc += v;
                Some(o)
            })
            .collect();
        let total: usize = vocab.iter().sum();
        let mut vectors = Vec::with_capacity(vocab.len());
        for (f, field) in quantizer.fields.iter().enumerate() {
            match &field.quantizer {
                FieldQuantizer::Continuous { .. } => {
                    let col = real_train.column(f);
                    let centers: Vec<f64> = col
                        .iter()
                        .map(|&t| field.quantizer.bin_center(t).expect("numeric"))
                        .collect();
                    let n = centers.len().max(1) as f64;
                    let mean = centers.iter().sum::<f64>() / n;
                    let sd = (centers.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / n).sqrt();
                    vectors.push(
                        (0..vocab[f] as u32)
                            .map(|t| {
                                let c = field.quantizer.bin_center(t).expect("numeric");
                                vec![1.0, if sd > 0.0 { (c - mean) / sd } else { 0.0 }]
                            })
                            .collect(),
                    );
                }
                FieldQuantizer::Categorical { .. } => {
                    let mut profiles = vec![vec![0.0; total]; vocab[f]];
                    let mut counts = vec![0usize; vocab[f]];
                    for row in real_train.rows() {
                        let t = row[f] as usize;
                        counts[t] += 1;
                        for (g, &u) in row.iter().enumerate() {
                            if g != f {
                                profiles[t][offsets[g] + u as usize] += 1.0;
                            }
                        }
                    }
                    for (p, &c) in profiles.iter_mut().zip(&counts) {
                        if c > 0 {
                            p.iter_mut().for_each(|v| *v /= c as f64);
                        }
                    }
                    vectors.push(profiles);
                }
            }
        }
        let unseen = quantizer.fields.iter().map(|f| f.quantizer.unseen_token()).collect();
        TokenEmbeddings { vectors, unseen }
    }

    pub fn cosine(&self, field: usize, a: u32, b: u32) -> f64 {
        let (x, y) = (&self.vectors[field][a as usize], &self.vectors[field][b as usize]);
        let dot: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nx == 0.0 || ny == 0.0 {
            0.0
        } else {
            dot / (nx * ny)
        }
    }

    /// The `n` tokens of `field` most similar to `token` (excluding itself
    /// and the unseen token); ties go to the lower token id.
    pub fn nearest(&self, field: usize, token: u32, n: usize) -> Vec<u32> {
        let mut cands: Vec<(f64, u32)> = (0..self.vectors[field].len() as u32)
            .filter(|&t| t != token && Some(t) != self.unseen[field])
            .map(|t| (self.cosine(field, token, t), t))
            .collect();
        cands.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        cands.into_iter().take(n).map(|(_, t)| t).collect()
    }
}

fn cross_entropy<S: Scalar>(p: S, label: u8) -> S {
    let eps = S::lit(1e-12);
    let p = p.max(eps).min(S::one() - eps);
    if label == 1 {
        -p.ln()
    } else {
        -(S::one() - p).ln()
    }
}

/// Greedy substitution attack on one tokenized sample. Attackable fields are
/// visited in a seeded random order; at each, the candidate raising the
/// cross-entropy of the true label the most is kept if it strictly raises
/// it. Stops once `⌊budget · fields⌋` fields have been substituted.
pub fn greedy_substitution_attack<S: Scalar>(
    classifier: &dyn Classifier<S>,
    tokens: &[u32],
    label: u8,
    featurizer: &TokenFeaturizer<S>,
    embeddings: &TokenEmbeddings,
    cfg: &AttackConfig,
    order_seed: u64,
) -> Vec<u32> {
    let mut fields = featurizer.attackable_fields();
    let max_subs = cfg.max_substitutions(fields.len());
    let mut current = tokens.to_vec();
    if max_subs == 0 {
        return current;
    }
    fields.shuffle(&mut seed::rng(order_seed));
    let mut row = vec![S::zero(); featurizer.dim()];
    featurizer.write_row(&current, &mut row);
    let mut loss = cross_entropy(
        classifier.predict_proba(ArrayView2::from_shape((1, row.len()), &row).expect("row"))[0],
        label,
    );
    let mut substituted = 0;
    for f in fields {
        if substituted >= max_subs {
            break;
        }
        let cands = embeddings.nearest(f, current[f], cfg.candidates);
        if cands.is_empty() {
            continue;
        }
        let mut batch = Array2::from_elem((cands.len(), featurizer.dim()), S::zero());
        let mut trial = current.clone();
        for (i, &c) in cands.iter().enumerate() {
            trial[f] = c;
            featurizer.write_row(&trial, batch.row_mut(i).as_slice_mut().expect("standard layout"));
        }
        let probs = classifier.predict_proba(batch.view());
        let mut best: Option<(S, u32)> = None;
        for (&p, &c) in probs.iter().zip(&cands) {
            let l = cross_entropy(p, label);
            if best.is_none_or(|(bl, _)| l > bl) {
                best = Some((l, c));
            }
        }
        if let Some((l, c)) = best {
            if l > loss {
                current[f] = c;
                loss = l;
                substituted += 1;
            }
        }
    }
    current
}

/// Attacks every row of `tokens` (in parallel, one derived seed per row).
pub fn attack_all<S: Scalar>(
    classifier: &dyn Classifier<S>,
    tokens: ArrayView2<u32>,
    labels: &[u8],
    featurizer: &TokenFeaturizer<S>,
    embeddings: &TokenEmbeddings,
    cfg: &AttackConfig,
) -> TokenMatrix {
    let rows: Vec<Vec<u32>> = (0..tokens.nrows())
        .into_par_iter()
        .map(|i| {
            let row = tokens.row(i).to_vec();
            let s = seed::derive(cfg.seed, &[seed::tag("attack"), i as u64]);
            greedy_substitution_attack(classifier, &row, labels[i], featurizer, embeddings, cfg, s)
        })
        .collect();
    let mut out = TokenMatrix::zeros(tokens.dim());
    for (i, r) in rows.into_iter().enumerate() {
        out.row_mut(i).assign(&ndarray::ArrayView1::from(&r));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{
        fit_quantizer, Column, ColumnKind, ColumnSpec, DatasetSchema, Origin, ProtectedSpec, TabularDataset,
    };
    use crate::embedding::{fit_embedder, FeatureMap};
    use ndarray::Array1;

    struct Linear {
        w: Array1<f64>,
        b: f64,
    }

    impl Classifier<f64> for Linear {
        fn predict_proba(&self, x: ArrayView2<f64>) -> Vec<f64> {
            x.dot(&self.w)
                .iter()
                .map(|z| 1.0 / (1.0 + (-(z + self.b)).exp()))
                .collect()
        }
    }

    struct Constant;

    impl Classifier<f64> for Constant {
        fn predict_proba(&self, x: ArrayView2<f64>) -> Vec<f64> {
            vec![0.7; x.nrows()]
        }
    }

    /// Three categorical attackable fields with 6 categories each plus target.
    fn fixture() -> (TabularDataset, Quantizer, Embedder) {
        let n = 120;
        let cat = |f: &dyn Fn(usize) -> usize| Column::Categorical((0..n).map(|i| format!("v{}", f(i))).collect());
        let schema = DatasetSchema::new(
            vec![
                ColumnSpec {
                    name: "a".into(),
                    kind: ColumnKind::Categorical,
                },
                ColumnSpec {
                    name: "b".into(),
                    kind: ColumnKind::Categorical,
                },
                ColumnSpec {
                    name: "c".into(),
                    kind: ColumnKind::Categorical,
                },
                ColumnSpec {
                    name: "y".into(),
                    kind: ColumnKind::Categorical,
                },
            ],
            "y",
            ProtectedSpec {
                column: "a".into(),
                privileged_value: "v0".into(),
            },
            vec![],
        )
        .unwrap();
        let d = TabularDataset::from_columns(
            schema,
            vec![
                cat(&|i| i % 6),
                cat(&|i| (i * 7 / 3) % 6),
                cat(&|i| (i * i + 1) % 6),
                Column::Categorical((0..n).map(|i| (i % 2).to_string()).collect()),
            ],
            Origin::Real,
        )
        .unwrap();
        let q = fit_quantizer(&d, 4).unwrap();
        let e = fit_embedder(&d).unwrap();
        (d, q, e)
    }

    #[test]
    fn featurizer_matches_embedder_on_decoded_tokens() {
        let (d, q, e) = fixture();
        let tokens = q.quantize(&d);
        let fz = TokenFeaturizer::<f64>::new(&q, &e).unwrap();
        assert_eq!(fz.featurize(tokens.view()), e.embed(&q.decode(&tokens, &d)).unwrap());
        assert_eq!(fz.attackable_fields(), vec![0, 1, 2]);
    }

    #[test]
    fn zero_budget_and_constant_model_leave_input() {
        let (d, q, e) = fixture();
        let tokens = q.quantize(&d);
        let fz = TokenFeaturizer::<f64>::new(&q, &e).unwrap();
        let emb = TokenEmbeddings::fit(&q, tokens.view());
        let row = tokens.row(0).to_vec();
        let lin = Linear {
            w: Array1::from_shape_fn(fz.dim(), |i| (i as f64 * 0.37).sin()),
            b: 0.0,
        };
        let zero = AttackConfig {
            budget: 0.0,
            ..AttackConfig::default()
        };
        assert_eq!(greedy_substitution_attack(&lin, &row, 1, &fz, &emb, &zero, 1), row);
        let full = AttackConfig {
            budget: 1.0,
            ..AttackConfig::default()
        };
        assert_eq!(greedy_substitution_attack(&Constant, &row, 1, &fz, &emb, &full, 1), row);
    }

    #[test]
    fn budget_limits_substitutions() {
        let (d, q, e) = fixture();
        let tokens = q.quantize(&d);
        let fz = TokenFeaturizer::<f64>::new(&q, &e).unwrap();
        let emb = TokenEmbeddings::fit(&q, tokens.view());
        let lin = Linear {
            w: Array1::from_shape_fn(fz.dim(), |i| (i as f64 * 1.37).cos()),
            b: 0.1,
        };
        let cfg = AttackConfig {
            budget: 0.5,
            ..AttackConfig::default()
        };
        for i in 0..20 {
            let row = tokens.row(i).to_vec();
            let out = greedy_substitution_attack(&lin, &row, (i % 2) as u8, &fz, &emb, &cfg, i as u64);
            let changed = row.iter().zip(&out).filter(|(a, b)| a != b).count();
            assert!(changed <= 1);
        }
    }

    #[test]
    fn greedy_matches_exhaustive_search_for_linear_model() {
        let (d, q, e) = fixture();
        let tokens = q.quantize(&d);
        let fz = TokenFeaturizer::<f64>::new(&q, &e).unwrap();
        let emb = TokenEmbeddings::fit(&q, tokens.view());
        let cfg = AttackConfig {
            budget: 1.0,
            ..AttackConfig::default()
        };
        for trial in 0..10u64 {
            let lin = Linear {
                w: Array1::from_shape_fn(fz.dim(), |i| ((i as f64 + 1.0) * (trial as f64 + 0.3) * 2.1).sin()),
                b: 0.05 * trial as f64,
            };
            let row = tokens.row(trial as usize * 7).to_vec();
            let label = (trial % 2) as u8;
            let got = greedy_substitution_attack(&lin, &row, label, &fz, &emb, &cfg, trial);
            // every field keeps its token or takes one of its 5 candidates
            let options: Vec<Vec<u32>> = (0..3)
                .map(|f| std::iter::once(row[f]).chain(emb.nearest(f, row[f], 5)).collect())
                .collect();
            let loss = |t: &[u32]| {
                let x = fz.featurize(ArrayView2::from_shape((1, 4), t).unwrap());
                cross_entropy(lin.predict_proba(x.view())[0], label)
            };
            let mut best = (loss(&row), row.clone());
            for &a in &options[0] {
                for &b in &options[1] {
                    for &c in &options[2] {
                        let t = vec![a, b, c, row[3]];
                        let l = loss(&t);
                        if l > best.0 + 1e-12 {
                            best = (l, t);
                        }
                    }
                }
            }
            assert!((loss(&got) - best.0).abs() < 1e-12, "trial {trial}");
            assert_eq!(got, best.1, "trial {trial}");
        }
    }

    #[test]
    fn nearest_excludes_self_and_unseen() {
        let (d, q, _) = fixture();
        let emb = TokenEmbeddings::fit(&q, q.quantize(&d).view());
        let n = emb.nearest(0, 2, 10);
        assert_eq!(n.len(), 5);
        assert!(!n.contains(&2) && !n.contains(&6));
    }
}
