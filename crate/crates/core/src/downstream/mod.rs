//! Downstream classifiers trained on synthetic (or real) rows and evaluated
//! on real rows: utility scores, group fairness, and robustness under a
//! greedy token-substitution attack.

mod attack;
mod classifier;
mod fairness;
mod knn;
mod logistic;
mod mlp;
mod scores;

pub use attack::{attack_all, greedy_substitution_attack, AttackConfig, TokenEmbeddings, TokenFeaturizer};
pub use classifier::{train_classifier, Classifier, ClassifierSpec, PredictionSet};
pub use fairness::{fairness_metrics, FairnessScores};
pub use knn::{knn_classify, KnnClassifier};
pub use logistic::{train_logistic_regression, LogisticRegression, LogisticSpec};
pub use mlp::{train_mlp, Mlp, MlpSpec};
pub use scores::{classification_scores, robustness_metrics, ClassificationScores, RobustnessScores};
