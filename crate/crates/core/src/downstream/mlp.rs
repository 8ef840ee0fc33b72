use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::classifier::{check_labels, Classifier, PredictionSet};
use super::logistic::sigmoid;
use super::scores::classification_scores;
use crate::error::{AuditError, Result};
use crate::{seed, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpSpec {
    pub hidden: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
}

impl Default for MlpSpec {
    fn default() -> Self {
        MlpSpec {
            hidden: 64,
            learning_rate: 3e-4,
            batch_size: 64,
            max_epochs: 30,
            patience: 3,
            seed: 0,
        }
    }
}

const BN_EPS: f64 = 1e-5;
const BN_MOMENTUM: f64 = 0.9;
const ADAM_B1: f64 = 0.9;
const ADAM_B2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

/// `input → linear(hidden) → batch norm → ReLU → linear(1)` with a logistic
/// output. The first layer has no bias (batch norm's shift replaces it).
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<S: Scalar> {
    pub w1: Array2<S>,
    pub gamma: Array1<S>,
    pub beta: Array1<S>,
    pub w2: Array1<S>,
    pub b2: S,
    pub running_mean: Array1<S>,
    pub running_var: Array1<S>,
    /// Epoch (1-based) whose parameters were kept.
    pub best_epoch: usize,
    /// Last epoch trained before stopping.
    pub stopped_epoch: usize,
    pub best_val_f1: f64,
}

/// Gradient with the same layout as the trainable parameters.
#[derive(Debug, Clone)]
pub struct MlpGrad<S: Scalar> {
    pub w1: Array2<S>,
    pub gamma: Array1<S>,
    pub beta: Array1<S>,
    pub w2: Array1<S>,
    pub b2: S,
}

struct BatchCache<S: Scalar> {
    mean: Array1<S>,
    var: Array1<S>,
}

fn bce<S: Scalar>(z: S, y: S) -> S {
    let sp = if z > S::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    };
    sp - y * z
}

impl<S: Scalar> Mlp<S> {
    pub fn init(input: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = seed::rng(seed);
        let s1 = S::lit((2.0 / input.max(1) as f64).sqrt());
        let s2 = S::lit((1.0 / hidden as f64).sqrt());
        let mut normal = || S::lit(rng.sample::<f64, _>(StandardNormal));
        let w1 = Array2::from_shape_simple_fn((input, hidden), || normal() * s1);
        let w2 = Array1::from_shape_simple_fn(hidden, || normal() * s2);
        Mlp {
            w1,
            gamma: Array1::from_elem(hidden, S::one()),
            beta: Array1::from_elem(hidden, S::zero()),
            w2,
            b2: S::zero(),
            running_mean: Array1::from_elem(hidden, S::zero()),
            running_var: Array1::from_elem(hidden, S::one()),
            best_epoch: 0,
            stopped_epoch: 0,
            best_val_f1: 0.0,
        }
    }

    pub fn n_params(&self) -> usize {
        self.w1.len() + 3 * self.gamma.len() + 1
    }

    /// Trainable parameters flattened as `w1 (row-major), γ, β, w2, b2`.
    pub fn flat_params(&self) -> Vec<S> {
        let mut v: Vec<S> = self.w1.iter().copied().collect();
        v.extend(self.gamma.iter().chain(&self.beta).chain(&self.w2).copied());
        v.push(self.b2);
        v
    }

    pub fn set_flat_params(&mut self, v: &[S]) {
        assert_eq!(v.len(), self.n_params());
        let h = self.gamma.len();
        let nw = self.w1.len();
        self.w1.iter_mut().zip(&v[..nw]).for_each(|(a, b)| *a = *b);
        self.gamma.assign(&ArrayView1::from(&v[nw..nw + h]));
        self.beta.assign(&ArrayView1::from(&v[nw + h..nw + 2 * h]));
        self.w2.assign(&ArrayView1::from(&v[nw + 2 * h..nw + 3 * h]));
        self.b2 = v[nw + 3 * h];
    }

    fn normalize(&self, h: &Array2<S>, mean: &Array1<S>, var: &Array1<S>) -> Array2<S> {
        let inv_std = var.mapv(|v| S::one() / (v + S::lit(BN_EPS)).sqrt());
        (h - &mean.view().insert_axis(Axis(0))) * inv_std.view().insert_axis(Axis(0))
    }

    /// Logits using running batch-norm statistics.
    pub fn logits(&self, x: ArrayView2<S>) -> Array1<S> {
        let h = x.dot(&self.w1);
        let hat = self.normalize(&h, &self.running_mean, &self.running_var);
        let a = hat * self.gamma.view().insert_axis(Axis(0)) + self.beta.view().insert_axis(Axis(0));
        a.mapv(|v| v.max(S::zero())).dot(&self.w2) + self.b2
    }

    /// Mean BCE loss and its gradient on a batch, using batch statistics.
    pub fn loss_and_grad(&self, x: ArrayView2<S>, y: &[u8]) -> (S, MlpGrad<S>) {
        let (loss, grad, _) = self.forward_backward(x, y);
        (loss, grad)
    }

    /// Mean BCE loss on a batch with batch statistics (training mode).
    pub fn batch_loss(&self, x: ArrayView2<S>, y: &[u8]) -> S {
        self.forward_backward(x, y).0
    }

    fn forward_backward(&self, x: ArrayView2<S>, y: &[u8]) -> (S, MlpGrad<S>, BatchCache<S>) {
        let m = S::from_usize_lossy(x.nrows());
        let h = x.dot(&self.w1);
        let mean = h.mean_axis(Axis(0)).expect("nonempty batch");
        let centered = &h - &mean.view().insert_axis(Axis(0));
        let var = centered.mapv(|v| v * v).mean_axis(Axis(0)).expect("nonempty batch");
        let inv_std = var.mapv(|v| S::one() / (v + S::lit(BN_EPS)).sqrt());
        let hat = centered * inv_std.view().insert_axis(Axis(0));
        let a = &hat * &self.gamma.view().insert_axis(Axis(0)) + self.beta.view().insert_axis(Axis(0));
        let r = a.mapv(|v| v.max(S::zero()));
        let z = r.dot(&self.w2) + self.b2;
        let yv: Array1<S> = y.iter().map(|&v| S::from_u8(v).expect("0/1")).collect();
        let loss = z.iter().zip(&yv).map(|(&z, &y)| bce(z, y)).sum::<S>() / m;

        let dz: Array1<S> = z.iter().zip(&yv).map(|(&z, &y)| (sigmoid(z) - y) / m).collect();
        let dw2 = r.t().dot(&dz);
        let db2 = dz.sum();
        let dr = dz.view().insert_axis(Axis(1)).dot(&self.w2.view().insert_axis(Axis(0)));
        let mut da = dr;
        da.zip_mut_with(&a, |g, &av| {
            if av <= S::zero() {
                *g = S::zero()
            }
        });
        let dgamma = (&da * &hat).sum_axis(Axis(0));
        let dbeta = da.sum_axis(Axis(0));
        let dhat = da * self.gamma.view().insert_axis(Axis(0));
        let sum_dhat = dhat.sum_axis(Axis(0));
        let sum_dhat_hat = (&dhat * &hat).sum_axis(Axis(0));
        let dh =
            ((dhat * m) - sum_dhat.view().insert_axis(Axis(0)) - &(&hat * &sum_dhat_hat.view().insert_axis(Axis(0))))
                * (inv_std / m).view().insert_axis(Axis(0));
        let dw1 = x.t().dot(&dh);
        (
            loss,
            MlpGrad {
                w1: dw1,
                gamma: dgamma,
                beta: dbeta,
                w2: dw2,
                b2: db2,
            },
            BatchCache { mean, var },
        )
    }
}

impl<S: Scalar> MlpGrad<S> {
    pub fn flat(&self) -> Vec<S> {
        let mut v: Vec<S> = self.w1.iter().copied().collect();
        v.extend(self.gamma.iter().chain(&self.beta).chain(&self.w2).copied());
        v.push(self.b2);
        v
    }
}

impl<S: Scalar> Classifier<S> for Mlp<S> {
    fn predict_proba(&self, x: ArrayView2<S>) -> Vec<S> {
        self.logits(x).iter().map(|&z| sigmoid(z)).collect()
    }
}

struct Adam<S> {
    m: Vec<S>,
    v: Vec<S>,
    t: i32,
}

impl<S: Scalar> Adam<S> {
    fn new(n: usize) -> Self {
        Adam {
            m: vec![S::zero(); n],
            v: vec![S::zero(); n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [S], grad: &[S], lr: S) {
        self.t += 1;
        let (b1, b2) = (S::lit(ADAM_B1), S::lit(ADAM_B2));
        let c1 = S::one() - b1.powi(self.t);
        let c2 = S::one() - b2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = b1 * self.m[i] + (S::one() - b1) * grad[i];
            self.v[i] = b2 * self.v[i] + (S::one() - b2) * grad[i] * grad[i];
            let mh = self.m[i] / c1;
            let vh = self.v[i] / c2;
            params[i] -= lr * mh / (vh.sqrt() + S::lit(ADAM_EPS));
        }
    }
}

fn f1_of<S: Scalar>(model: &Mlp<S>, x: ArrayView2<S>, y: &[u8]) -> f64 {
    let pred = model.predict(x);
    let set = PredictionSet {
        predicted: pred,
        truth: y.to_vec(),
        privileged: vec![true; y.len()],
    };
    classification_scores(&set).f1
}

/// Minibatch Adam training with early stopping on validation F1: training
/// stops after `patience` epochs without strict improvement and the
/// best-epoch parameters are returned. Batches with fewer than 2 rows are
/// skipped (batch statistics need two rows).
pub fn train_mlp<S: Scalar>(
    x: ArrayView2<S>,
    y: &[u8],
    val_x: ArrayView2<S>,
    val_y: &[u8],
    spec: &MlpSpec,
) -> Result<Mlp<S>> {
    check_labels(y, x.nrows())?;
    if val_x.nrows() == 0 {
        return Err(AuditError::TooFewRows {
            what: "MLP validation set",
            need: 1,
            got: 0,
        });
    }
    if val_y.len() != val_x.nrows() || val_x.ncols() != x.ncols() {
        return Err(AuditError::DimensionMismatch {
            expected: val_x.nrows(),
            got: val_y.len(),
        });
    }
    if spec.hidden == 0 || spec.batch_size < 2 || spec.max_epochs == 0 || !(spec.learning_rate > 0.0) {
        return Err(AuditError::invalid(
            "MLP hyperparameters must be positive (batch size at least 2)",
        ));
    }
    let mut model = Mlp::init(x.ncols(), spec.hidden, seed::derive(spec.seed, &[seed::tag("init")]));
    let mut rng = seed::rng(seed::derive(spec.seed, &[seed::tag("batches")]));
    let mut adam = Adam::new(model.n_params());
    let lr = S::lit(spec.learning_rate);
    let momentum = S::lit(BN_MOMENTUM);
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    let mut best: Option<Mlp<S>> = None;
    let mut best_f1 = f64::NEG_INFINITY;
    let mut since_best = 0;
    let mut params = model.flat_params();
    for epoch in 1..=spec.max_epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(spec.batch_size) {
            if chunk.len() < 2 {
                continue;
            }
            let bx = x.select(Axis(0), chunk);
            let by: Vec<u8> = chunk.iter().map(|&i| y[i]).collect();
            let (_, grad, cache) = model.forward_backward(bx.view(), &by);
            adam.step(&mut params, &grad.flat(), lr);
            model.set_flat_params(&params);
            let unbias = S::from_usize_lossy(chunk.len()) / S::from_usize_lossy(chunk.len() - 1);
            model.running_mean = &model.running_mean * momentum + &(cache.mean * (S::one() - momentum));
            model.running_var = &model.running_var * momentum + &(cache.var * ((S::one() - momentum) * unbias));
        }
        model.stopped_epoch = epoch;
        let f1 = f1_of(&model, val_x, val_y);
        if f1 > best_f1 {
            best_f1 = f1;
            since_best = 0;
            let mut snapshot = model.clone();
            snapshot.best_epoch = epoch;
            best = Some(snapshot);
        } else {
            since_best += 1;
            if since_best >= spec.patience {
                break;
            }
        }
    }
    let mut out = best.expect("at least one epoch");
    out.stopped_epoch = model.stopped_epoch;
    out.best_val_f1 = best_f1;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor(n: usize, seed_: u64) -> (Array2<f64>, Vec<u8>) {
        let mut rng = seed::rng(seed_);
        let mut x = Array2::zeros((n, 2));
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let a: f64 = rng.random_range(-1.0..1.0);
            let b: f64 = rng.random_range(-1.0..1.0);
            x[[i, 0]] = a;
            x[[i, 1]] = b;
            y.push(u8::from((a > 0.0) != (b > 0.0)));
        }
        (x, y)
    }

    #[test]
    fn learns_xor() {
        let (x, y) = xor(2000, 1);
        let (vx, vy) = xor(300, 2);
        let (tx, ty) = xor(500, 3);
        let spec = MlpSpec {
            learning_rate: 1e-2,
            max_epochs: 60,
            patience: 10,
            ..MlpSpec::default()
        };
        let m = train_mlp(x.view(), &y, vx.view(), &vy, &spec).unwrap();
        let pred = m.predict(tx.view());
        let acc = pred.iter().zip(&ty).filter(|(a, b)| a == b).count() as f64 / ty.len() as f64;
        assert!(acc >= 0.95, "accuracy {acc}");
    }

    #[test]
    fn early_stopping_keeps_best_epoch() {
        let (x, y) = xor(400, 4);
        let (vx, vy) = xor(100, 5);
        let spec = MlpSpec {
            max_epochs: 200,
            patience: 3,
            ..MlpSpec::default()
        };
        let m = train_mlp(x.view(), &y, vx.view(), &vy, &spec).unwrap();
        if m.stopped_epoch < spec.max_epochs {
            assert_eq!(m.best_epoch + spec.patience, m.stopped_epoch);
        }
        assert!((f1_of(&m, vx.view(), &vy) - m.best_val_f1).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (x, y) = xor(32, 6);
        let model = Mlp::<f64>::init(2, 8, 7);
        let (_, grad) = model.loss_and_grad(x.view(), &y);
        let g = grad.flat();
        let p = model.flat_params();
        let h = 1e-5;
        for i in 0..p.len() {
            let mut plus = model.clone();
            let mut q = p.clone();
            q[i] += h;
            plus.set_flat_params(&q);
            let mut minus = model.clone();
            q[i] -= 2.0 * h;
            minus.set_flat_params(&q);
            let num = (plus.batch_loss(x.view(), &y) - minus.batch_loss(x.view(), &y)) / (2.0 * h);
            let rel = (g[i] - num).abs() / g[i].abs().max(num.abs()).max(1e-8);
            assert!(rel <= 1e-4, "param {i}: analytic {} numeric {num}", g[i]);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let (x, y) = xor(200, 8);
        let spec = MlpSpec {
            max_epochs: 3,
            ..MlpSpec::default()
        };
        let a = train_mlp(x.view(), &y, x.view(), &y, &spec).unwrap();
        let b = train_mlp(x.view(), &y, x.view(), &y, &spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_validation_rejected() {
        let (x, y) = xor(20, 8);
        let empty = Array2::<f64>::zeros((0, 2));
        assert!(train_mlp(x.view(), &y, empty.view(), &[], &MlpSpec::default()).is_err());
    }
}
