use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::classifier::{check_labels, Classifier};
use crate::embedding::anova_f_select;
use crate::error::Result;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticSpec {
    /// L2 penalty on the weights (the bias is not penalized).
    pub l2: f64,
    pub max_iter: usize,
    /// Stop once the gradient norm falls to this value.
    pub tol: f64,
    /// Number of ANOVA-F selected features.
    pub max_features: usize,
}

impl Default for LogisticSpec {
    fn default() -> Self {
        LogisticSpec {
            l2: 1e-4,
            max_iter: 500,
            tol: 1e-6,
            max_features: 100,
        }
    }
}

/// Standardize → ANOVA-F select → L2 logistic regression.
#[derive(Debug, Clone)]
pub struct LogisticRegression<S: Scalar> {
    mean: Array1<S>,
    scale: Array1<S>,
    selected: Vec<usize>,
    pub weights: Array1<S>,
    pub bias: S,
    pub iterations: usize,
}

fn softplus<S: Scalar>(z: S) -> S {
    if z > S::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub(crate) fn sigmoid<S: Scalar>(z: S) -> S {
    if z >= S::zero() {
        S::one() / (S::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (S::one() + e)
    }
}

struct Objective<'a, S: Scalar> {
    x: ArrayView2<'a, S>,
    y: Array1<S>,
    l2: S,
}

impl<S: Scalar> Objective<'_, S> {
    fn loss(&self, w: &Array1<S>, b: S) -> S {
        let n = S::from_usize_lossy(self.x.nrows());
        let z = self.x.dot(w) + b;
        let data = z.iter().zip(&self.y).map(|(&z, &y)| softplus(z) - y * z).sum::<S>() / n;
        data + S::lit(0.5) * self.l2 * w.dot(w)
    }

    fn grad(&self, w: &Array1<S>, b: S) -> (Array1<S>, S) {
        let n = S::from_usize_lossy(self.x.nrows());
        let z = self.x.dot(w) + b;
        let r: Array1<S> = z.iter().zip(&self.y).map(|(&z, &y)| (sigmoid(z) - y) / n).collect();
        let gw = self.x.t().dot(&r) + &(w * self.l2);
        (gw, r.sum())
    }
}

/// Full-batch gradient descent with Armijo backtracking from a zero start.
fn fit_gd<S: Scalar>(x: ArrayView2<S>, y: &[u8], spec: &LogisticSpec) -> (Array1<S>, S, usize) {
    let obj = Objective {
        x,
        y: y.iter().map(|&v| S::from_u8(v).expect("0/1")).collect(),
        l2: S::lit(spec.l2),
    };
    let mut w = Array1::from_elem(x.ncols(), S::zero());
    let mut b = S::zero();
    let mut step = S::one();
    let tol = S::lit(spec.tol);
    let mut iterations = 0;
    let mut current = obj.loss(&w, b);
    while iterations < spec.max_iter {
        let (gw, gb) = obj.grad(&w, b);
        let gnorm2 = gw.dot(&gw) + gb * gb;
        if gnorm2.sqrt() <= tol {
            break;
        }
        iterations += 1;
        step *= S::lit(2.0);
        loop {
            let w_new = &w - &(&gw * step);
            let b_new = b - gb * step;
            let l = obj.loss(&w_new, b_new);
            if l <= current - S::lit(0.5) * step * gnorm2 || step < S::lit(1e-12) {
                w = w_new;
                b = b_new;
                current = l;
                break;
            }
            step *= S::lit(0.5);
        }
    }
    (w, b, iterations)
}

pub fn train_logistic_regression<S: Scalar>(
    x: ArrayView2<S>,
    y: &[u8],
    spec: &LogisticSpec,
) -> Result<LogisticRegression<S>> {
    check_labels(y, x.nrows())?;
    let n = S::from_usize_lossy(x.nrows());
    let mean = x.mean_axis(Axis(0)).expect("nonempty");
    let centered = &x - &mean.view().insert_axis(Axis(0));
    let scale: Array1<S> = centered
        .axis_iter(Axis(1))
        .map(|c| {
            let sd = (c.dot(&c) / n).sqrt();
            if sd > S::lit(1e-12) {
                sd
            } else {
                S::one()
            }
        })
        .collect();
    let standardized = centered / scale.view().insert_axis(Axis(0));
    let selected = anova_f_select(standardized.view(), y, spec.max_features.max(1))?;
    let xs = standardized.select(Axis(1), &selected);
    let (weights, bias, iterations) = fit_gd(xs.view(), y, spec);
    Ok(LogisticRegression {
        mean,
        scale,
        selected,
        weights,
        bias,
        iterations,
    })
}

impl<S: Scalar> LogisticRegression<S> {
    fn transform(&self, x: ArrayView2<S>) -> Array2<S> {
        let sel = x.select(Axis(1), &self.selected);
        let m = self.mean.select(Axis(0), &self.selected);
        let s = self.scale.select(Axis(0), &self.selected);
        (sel - m.view().insert_axis(Axis(0))) / s.view().insert_axis(Axis(0))
    }

    pub fn selected_features(&self) -> &[usize] {
        &self.selected
    }

    pub fn logits(&self, x: ArrayView2<S>) -> Array1<S> {
        self.transform(x).dot(&self.weights) + self.bias
    }
}

impl<S: Scalar> Classifier<S> for LogisticRegression<S> {
    fn predict_proba(&self, x: ArrayView2<S>) -> Vec<S> {
        self.logits(x).iter().map(|&z| sigmoid(z)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn separable_data_is_fit_perfectly() {
        let x = array![[0.0, 0.0], [1.0, 0.2], [0.3, 1.0], [3.0, 3.0], [4.0, 2.5], [2.8, 4.1]];
        let y = [0u8, 0, 0, 1, 1, 1];
        let m = train_logistic_regression(x.view(), &y, &LogisticSpec::default()).unwrap();
        assert_eq!(m.predict(x.view()), y.to_vec());
    }

    #[test]
    fn constant_features_predict_the_prior() {
        let x = Array2::<f64>::from_elem((8, 2), 3.0);
        let y = [1u8, 0, 0, 0, 1, 0, 0, 0];
        let m = train_logistic_regression(x.view(), &y, &LogisticSpec::default()).unwrap();
        for p in m.predict_proba(x.view()) {
            assert!((p - 0.25).abs() < 1e-4, "{p}");
        }
    }

    #[test]
    fn deterministic() {
        let x = Array2::from_shape_fn((30, 3), |(i, j)| ((i * 7 + j * 3) % 5) as f64);
        let y: Vec<u8> = (0..30).map(|i| (i % 4 == 0) as u8).collect();
        let a = train_logistic_regression(x.view(), &y, &LogisticSpec::default()).unwrap();
        let b = train_logistic_regression(x.view(), &y, &LogisticSpec::default()).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.bias, b.bias);
    }

    #[test]
    fn selects_at_most_max_features() {
        let x = Array2::from_shape_fn((20, 5), |(i, j)| ((i * (j + 2)) % 7) as f64);
        let y: Vec<u8> = (0..20).map(|i| (i % 2) as u8).collect();
        let spec = LogisticSpec {
            max_features: 2,
            ..LogisticSpec::default()
        };
        let m = train_logistic_regression(x.view(), &y, &spec).unwrap();
        assert_eq!(m.selected_features().len(), 2);
    }

    #[test]
    fn single_class_rejected() {
        let x = Array2::<f64>::zeros((4, 2));
        assert!(train_logistic_regression(x.view(), &[1, 1, 1, 1], &LogisticSpec::default()).is_err());
    }
}
