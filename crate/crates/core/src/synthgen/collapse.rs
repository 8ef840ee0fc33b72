use super::copula::GaussianCopulaModel;
use crate::data::TabularDataset;
use crate::error::{AuditError, Result};
use crate::seed;

#[derive(Debug, Clone)]
pub struct CollapseRun {
    /// Generation `g` (0-based index `g − 1`) was fit on generation `g − 1`,
    /// the first on the real training data.
    pub generations: Vec<TabularDataset>,
    /// Generation at which every column became constant; the chain stops
    /// there.
    pub collapsed_at: Option<usize>,
}

/// Fits a Gaussian copula on `real_train`, samples `rows_per_gen` rows, and
/// repeats on each new sample for `generations` rounds.
pub fn iterative_retrain(
    real_train: &TabularDataset,
    generations: usize,
    rows_per_gen: usize,
    seed: u64,
) -> Result<CollapseRun> {
    if generations == 0 {
        return Err(AuditError::invalid("generations must be at least 1"));
    }
    let mut out: Vec<TabularDataset> = Vec::with_capacity(generations);
    for g in 1..=generations {
        let source = out.last().unwrap_or(real_train);
        let gen_seed = seed::derive(seed, &[seed::tag("generation"), g as u64]);
        let model = GaussianCopulaModel::fit(source, seed::derive(gen_seed, &[seed::tag("fit")]))
            .map_err(|e| e.in_stage(format!("generation {g}")))?;
        let sample = model.sample(rows_per_gen, seed::derive(gen_seed, &[seed::tag("sample")]))?;
        let collapsed = sample.schema().metric_columns().iter().all(|&j| {
            let col = sample.column(j);
            (1..sample.n_rows()).all(|i| col.cell(i).canonical_eq(&col.cell(0)))
        });
        out.push(sample);
        if collapsed {
            return Ok(CollapseRun {
                generations: out,
                collapsed_at: Some(g),
            });
        }
    }
    Ok(CollapseRun {
        generations: out,
        collapsed_at: None,
    })
}
