use super::classifier::PredictionSet;
use crate::error::{AuditError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationScores {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ClassificationScores {
    pub fn named(&self) -> [(&'static str, f64); 4] {
        [
            ("accuracy", self.accuracy),
            ("precision", self.precision),
            ("recall", self.recall),
            ("f1", self.f1),
        ]
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Binary scores with label 1 as the positive class; any 0/0 is 0.
pub fn classification_scores(pred: &PredictionSet) -> ClassificationScores {
    let (mut tp, mut fp, mut fn_, mut correct) = (0, 0, 0, 0);
    for (&p, &t) in pred.predicted.iter().zip(&pred.truth) {
        match (p, t) {
            (1, 1) => tp += 1,
            (1, _) => fp += 1,
            (_, 1) => fn_ += 1,
            _ => {}
        }
        correct += usize::from(p == t);
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    ClassificationScores {
        accuracy: ratio(correct, pred.len()),
        precision,
        recall,
        f1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessScores {
    pub adversarial: ClassificationScores,
    /// `|clean − adversarial|` per score.
    pub delta: ClassificationScores,
}

pub fn robustness_metrics(clean: &PredictionSet, adversarial: &PredictionSet) -> Result<RobustnessScores> {
    if clean.truth != adversarial.truth || clean.privileged != adversarial.privileged {
        return Err(AuditError::invalid("clean and adversarial predictions are not aligned"));
    }
    let c = classification_scores(clean);
    let a = classification_scores(adversarial);
    Ok(RobustnessScores {
        adversarial: a,
        delta: ClassificationScores {
            accuracy: (c.accuracy - a.accuracy).abs(),
            precision: (c.precision - a.precision).abs(),
            recall: (c.recall - a.recall).abs(),
            f1: (c.f1 - a.f1).abs(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(p: Vec<u8>, t: Vec<u8>) -> PredictionSet {
        let n = p.len();
        PredictionSet::new(p, t, vec![true; n]).unwrap()
    }

    #[test]
    fn perfect_predictions() {
        let s = classification_scores(&set(vec![1, 0, 1], vec![1, 0, 1]));
        assert_eq!((s.accuracy, s.precision, s.recall, s.f1), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn confusion_arithmetic() {
        // TP=2, FP=1, FN=1, TN=1
        let s = classification_scores(&set(vec![1, 1, 1, 0, 0], vec![1, 1, 0, 1, 0]));
        assert_eq!(s.precision, 2.0 / 3.0);
        assert_eq!(s.recall, 2.0 / 3.0);
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.accuracy, 0.6);
    }

    #[test]
    fn no_positives_gives_zero() {
        let s = classification_scores(&set(vec![0, 0], vec![0, 0]));
        assert_eq!((s.precision, s.recall, s.f1, s.accuracy), (0.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn misaligned_sets_rejected() {
        assert!(robustness_metrics(&set(vec![1], vec![1]), &set(vec![1], vec![0])).is_err());
    }

    proptest! {
        #[test]
        fn matches_confusion_table(pairs in prop::collection::vec((0u8..2, 0u8..2), 1..60)) {
            let (p, t): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
            let s = classification_scores(&set(p.clone(), t.clone()));
            let count = |a: u8, b: u8| p.iter().zip(&t).filter(|(x, y)| **x == a && **y == b).count() as f64;
            let (tp, fp, fn_, tn) = (count(1, 1), count(1, 0), count(0, 1), count(0, 0));
            prop_assert_eq!(s.accuracy, (tp + tn) / (tp + tn + fp + fn_));
            prop_assert_eq!(s.precision, if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 });
            prop_assert_eq!(s.recall, if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 });
            prop_assert!((0.0..=1.0).contains(&s.f1));
        }
    }
}
