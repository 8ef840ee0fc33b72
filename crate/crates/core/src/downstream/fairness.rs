use super::classifier::PredictionSet;
use crate::error::{AuditError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairnessScores {
    /// Equal opportunity difference `|ΔTPR|`.
    pub eod: f64,
    /// Average odds difference `|½(ΔTPR + ΔFPR)|`.
    pub aod: f64,
    /// Equalized odds `max(|ΔTPR|, |ΔFPR|)`.
    pub eq_odds: f64,
}

impl FairnessScores {
    pub fn named(&self) -> [(&'static str, f64); 3] {
        [("EOD", self.eod), ("AOD", self.aod), ("EqOdds", self.eq_odds)]
    }
}

/// (TPR, FPR) of the rows whose privileged flag equals `group`.
fn rates(pred: &PredictionSet, group: bool) -> Result<(f64, f64)> {
    let (mut tp, mut pos, mut fp, mut neg) = (0usize, 0usize, 0usize, 0usize);
    for i in 0..pred.len() {
        if pred.privileged[i] != group {
            continue;
        }
        if pred.truth[i] == 1 {
            pos += 1;
            tp += usize::from(pred.predicted[i] == 1);
        } else {
            neg += 1;
            fp += usize::from(pred.predicted[i] == 1);
        }
    }
    if pos == 0 || neg == 0 {
        let name = if group { "privileged" } else { "unprivileged" };
        return Err(AuditError::DegenerateGroup(format!(
            "{name} group has {pos} positive and {neg} negative rows"
        )));
    }
    Ok((tp as f64 / pos as f64, fp as f64 / neg as f64))
}

/// Group fairness gaps between the privileged and unprivileged groups. Each
/// group needs at least one positive and one negative ground-truth row.
pub fn fairness_metrics(pred: &PredictionSet) -> Result<FairnessScores> {
    let (tpr_p, fpr_p) = rates(pred, true)?;
    let (tpr_u, fpr_u) = rates(pred, false)?;
    let d_tpr = tpr_p - tpr_u;
    let d_fpr = fpr_p - fpr_u;
    Ok(FairnessScores {
        eod: d_tpr.abs(),
        aod: (0.5 * (d_tpr + d_fpr)).abs(),
        eq_odds: d_tpr.abs().max(d_fpr.abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Builds rows for one group with the requested confusion counts.
    fn group(rows: &mut Vec<(u8, u8, bool)>, privileged: bool, tp: usize, fn_: usize, fp: usize, tn: usize) {
        rows.extend(std::iter::repeat_n((1, 1, privileged), tp));
        rows.extend(std::iter::repeat_n((0, 1, privileged), fn_));
        rows.extend(std::iter::repeat_n((1, 0, privileged), fp));
        rows.extend(std::iter::repeat_n((0, 0, privileged), tn));
    }

    fn to_set(rows: Vec<(u8, u8, bool)>) -> PredictionSet {
        let p = rows.iter().map(|r| r.0).collect();
        let t = rows.iter().map(|r| r.1).collect();
        let g = rows.iter().map(|r| r.2).collect();
        PredictionSet::new(p, t, g).unwrap()
    }

    #[test]
    fn hand_arithmetic() {
        // privileged TPR 0.9, FPR 0.2; unprivileged TPR 0.7, FPR 0.1
        let mut rows = Vec::new();
        group(&mut rows, true, 9, 1, 2, 8);
        group(&mut rows, false, 7, 3, 1, 9);
        let f = fairness_metrics(&to_set(rows.clone())).unwrap();
        assert!((f.eod - 0.2).abs() < 1e-12);
        assert!((f.aod - 0.15).abs() < 1e-12);
        assert!((f.eq_odds - 0.2).abs() < 1e-12);
        let swapped = rows.into_iter().map(|(p, t, g)| (p, t, !g)).collect();
        assert_eq!(fairness_metrics(&to_set(swapped)).unwrap(), f);
    }

    #[test]
    fn perfect_classifier_is_fair() {
        let mut rows = Vec::new();
        group(&mut rows, true, 3, 0, 0, 2);
        group(&mut rows, false, 1, 0, 0, 4);
        let f = fairness_metrics(&to_set(rows)).unwrap();
        assert_eq!((f.eod, f.aod, f.eq_odds), (0.0, 0.0, 0.0));
    }

    #[test]
    fn degenerate_group_is_an_error() {
        let mut rows = Vec::new();
        group(&mut rows, true, 3, 0, 0, 2);
        group(&mut rows, false, 0, 0, 1, 4);
        assert!(matches!(
            fairness_metrics(&to_set(rows)),
            Err(AuditError::DegenerateGroup(_))
        ));
    }
}
