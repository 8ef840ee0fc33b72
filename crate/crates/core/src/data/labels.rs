use std::collections::BTreeSet;

use super::dataset::TabularDataset;
use crate::error::{AuditError, Result};

const POSITIVE_SPELLINGS: [&str; 5] = ["1", "yes", "true", "y", "positive"];

/// Binary label encoding and protected-group indicator, fixed from real data
/// so that every synthetic dataset is encoded identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryTask {
    pub target_column: usize,
    pub positive_value: String,
    pub protected_column: usize,
    pub privileged_value: String,
}

impl BinaryTask {
    /// The positive class is the observed value spelled like a positive
    /// (`1`, `yes`, `true`, `y`, `positive`, any case) if exactly one is;
    /// otherwise the lexicographically larger value.
    pub fn fit(real: &TabularDataset) -> Result<Self> {
        let schema = real.schema();
        let target_column = schema.target_index();
        let protected_column = schema.protected_index();
        let observed: BTreeSet<&str> = real
            .column(target_column)
            .as_categorical()
            .expect("validated schema")
            .iter()
            .map(String::as_str)
            .collect();
        match observed.len() {
            0 | 1 => return Err(AuditError::SingleClass),
            2 => {}
            n => {
                return Err(AuditError::Schema(format!(
                    "target {} has {n} classes; only binary tasks are supported",
                    schema.target
                )))
            }
        }
        let groups: BTreeSet<&str> = real
            .column(protected_column)
            .as_categorical()
            .expect("validated schema")
            .iter()
            .map(String::as_str)
            .collect();
        if groups.len() < 2 {
            return Err(AuditError::Schema(format!(
                "protected column {} has fewer than 2 observed values",
                schema.protected.column
            )));
        }
        let positive_like: Vec<&str> = observed
            .iter()
            .copied()
            .filter(|v| POSITIVE_SPELLINGS.iter().any(|p| p.eq_ignore_ascii_case(v)))
            .collect();
        let positive_value = if positive_like.len() == 1 {
            positive_like[0]
        } else {
            *observed.iter().next_back().expect("two values")
        };
        Ok(BinaryTask {
            target_column,
            positive_value: positive_value.to_string(),
            protected_column,
            privileged_value: schema.protected.privileged_value.clone(),
        })
    }

    /// 1 for the positive class; every other value (including values never
    /// seen in real data) is 0.
    pub fn labels(&self, data: &TabularDataset) -> Vec<u8> {
        data.column(self.target_column)
            .as_categorical()
            .expect("validated schema")
            .iter()
            .map(|v| u8::from(*v == self.positive_value))
            .collect()
    }

    /// Protected indicator: true for rows in the privileged group.
    pub fn privileged(&self, data: &TabularDataset) -> Vec<bool> {
        data.column(self.protected_column)
            .as_categorical()
            .expect("validated schema")
            .iter()
            .map(|v| *v == self.privileged_value)
            .collect()
    }
}
