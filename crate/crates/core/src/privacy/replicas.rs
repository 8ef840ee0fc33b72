use std::collections::HashMap;

use crate::data::TabularDataset;
use crate::error::{AuditError, Result};

/// Number of synthetic rows equal (over non-id columns, continuous values at
/// 12 significant digits) to some real training row. Each synthetic copy
/// counts separately.
pub fn replicated_rows(real_train: &TabularDataset, synth: &TabularDataset) -> Result<usize> {
    if real_train.schema().columns != synth.schema().columns {
        return Err(AuditError::Schema("real and synthetic schemas differ".into()));
    }
    let mut index: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, h) in real_train.row_hashes().into_iter().enumerate() {
        index.entry(h).or_default().push(i);
    }
    let count = synth
        .row_hashes()
        .into_iter()
        .enumerate()
        .filter(|(i, h)| {
            index.get(h).is_some_and(|candidates| {
                let row = synth.metric_cells(*i);
                candidates.iter().any(|&j| {
                    real_train
                        .metric_cells(j)
                        .iter()
                        .zip(&row)
                        .all(|(a, b)| a.canonical_eq(b))
                })
            })
        })
        .count();
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Column, ColumnKind, ColumnSpec, DatasetSchema, Origin, ProtectedSpec};

    fn ds(x: Vec<f64>, g: Vec<&str>) -> TabularDataset {
        let schema = DatasetSchema::new(
            vec![
                ColumnSpec {
                    name: "x".into(),
                    kind: ColumnKind::Continuous,
                },
                ColumnSpec {
                    name: "g".into(),
                    kind: ColumnKind::Categorical,
                },
                ColumnSpec {
                    name: "y".into(),
                    kind: ColumnKind::Categorical,
                },
            ],
            "y",
            ProtectedSpec {
                column: "g".into(),
                privileged_value: "a".into(),
            },
            vec![],
        )
        .unwrap();
        let y = (0..x.len()).map(|i| (i % 2).to_string()).collect();
        TabularDataset::from_columns(
            schema,
            vec![
                Column::Continuous(x),
                Column::Categorical(g.into_iter().map(String::from).collect()),
                Column::Categorical(y),
            ],
            Origin::Real,
        )
        .unwrap()
    }

    #[test]
    fn copies_are_counted() {
        let real = ds(vec![1.0, 2.0, 3.0, 4.0], vec!["a", "b", "a", "b"]);
        assert_eq!(replicated_rows(&real, &real.select_rows(&[0, 1, 2])).unwrap(), 3);
        assert_eq!(replicated_rows(&real, &real.select_rows(&[2, 2])).unwrap(), 2);
        assert_eq!(replicated_rows(&real, &real).unwrap(), 4);
    }

    #[test]
    fn disjoint_values_give_zero() {
        let real = ds(vec![1.0, 2.0], vec!["a", "b"]);
        let synth = ds(vec![10.0, 20.0], vec!["a", "b"]);
        assert_eq!(replicated_rows(&real, &synth).unwrap(), 0);
    }
}
