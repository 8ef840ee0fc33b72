use std::collections::BTreeSet;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::dataset::{Column, TabularDataset};
use super::hash::Cell;
use crate::error::{AuditError, Result};

/// Row-major `N × F` token ids, one column per quantized field.
pub type TokenMatrix = Array2<u32>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FieldQuantizer {
    /// Non-decreasing, deduplicated bin edges `e_0 = min ≤ … ≤ e_m = max`.
    /// A single edge means a constant column with one bin.
    Continuous { edges: Vec<f64> },
    /// Observed categories in sorted order; token `categories.len()` is the
    /// reserved unseen token.
    Categorical { categories: Vec<String> },
}

impl FieldQuantizer {
    /// |V_L|: number of tokens of the field (including the unseen token).
    pub fn vocab_size(&self) -> usize {
        match self {
            FieldQuantizer::Continuous { edges } => edges.len().saturating_sub(1).max(1),
            FieldQuantizer::Categorical { categories } => categories.len() + 1,
        }
    }

    pub fn unseen_token(&self) -> Option<u32> {
        match self {
            FieldQuantizer::Continuous { .. } => None,
            FieldQuantizer::Categorical { categories } => Some(categories.len() as u32),
        }
    }

    /// Half-open bins `[e_i, e_{i+1})` with the last bin closed; values
    /// outside the fitted range clamp to the outer bins.
    pub fn token_of(&self, cell: Cell<'_>) -> u32 {
        match (self, cell) {
            (FieldQuantizer::Continuous { edges }, Cell::Num(v)) => {
                let m = self.vocab_size();
                if edges.len() < 2 {
                    return 0;
                }
                let interior = &edges[1..m];
                interior.partition_point(|&e| e <= v) as u32
            }
            (FieldQuantizer::Categorical { categories }, Cell::Cat(s)) => categories
                .binary_search_by(|c| c.as_str().cmp(s))
                .map_or(categories.len() as u32, |i| i as u32),
            _ => panic!("cell kind does not match quantizer kind"),
        }
    }

    /// Midpoint of a numeric bin.
    pub fn bin_center(&self, token: u32) -> Option<f64> {
        match self {
            FieldQuantizer::Continuous { edges } => {
                let t = token as usize;
                if edges.len() < 2 {
                    edges.first().copied()
                } else {
                    Some(0.5 * (edges[t] + edges[t + 1]))
                }
            }
            FieldQuantizer::Categorical { .. } => None,
        }
    }

    pub fn category(&self, token: u32) -> Option<&str> {
        match self {
            FieldQuantizer::Categorical { categories } => categories.get(token as usize).map(String::as_str),
            FieldQuantizer::Continuous { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizedField {
    /// Index of the column in the dataset schema.
    pub column: usize,
    pub name: String,
    pub quantizer: FieldQuantizer,
}

/// Per-field vocabularies fit on real training rows. Every non-id column
/// (including target and protected columns) becomes one field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantizer {
    pub bins: usize,
    pub fields: Vec<QuantizedField>,
    pub warnings: Vec<String>,
}

/// Equal-frequency edges: `e_0 = min`, `e_k = sorted[⌊kN/B⌋]`, `e_B = max`,
/// duplicates removed.
fn quantile_edges(values: &[f64], bins: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut edges = Vec::with_capacity(bins + 1);
    edges.push(sorted[0]);
    for k in 1..bins {
        edges.push(sorted[(k * n / bins).min(n - 1)]);
    }
    edges.push(sorted[n - 1]);
    edges.dedup();
    edges
}

pub fn fit_quantizer(real_train: &TabularDataset, bins: usize) -> Result<Quantizer> {
    if bins < 2 {
        return Err(AuditError::invalid("quantizer needs at least 2 bins"));
    }
    let schema = real_train.schema();
    let mut fields = Vec::new();
    let mut warnings = Vec::new();
    for j in schema.metric_columns() {
        let name = schema.columns[j].name.clone();
        let quantizer = match real_train.column(j) {
            Column::Continuous(v) => {
                let edges = quantile_edges(v, bins);
                if edges.len() == 1 {
                    warnings.push(format!("column {name} is constant; quantized to a single bin"));
                }
                FieldQuantizer::Continuous { edges }
            }
            Column::Categorical(v) => {
                let cats: BTreeSet<&String> = v.iter().collect();
                FieldQuantizer::Categorical {
                    categories: cats.into_iter().cloned().collect(),
                }
            }
        };
        fields.push(QuantizedField {
            column: j,
            name,
            quantizer,
        });
    }
    Ok(Quantizer { bins, fields, warnings })
}

impl Quantizer {
    pub fn fit(real_train: &TabularDataset, bins: usize) -> Result<Self> {
        fit_quantizer(real_train, bins)
    }

    pub fn n_fields(&self) -> usize {
        self.fields.len()
    }

    pub fn vocab_sizes(&self) -> Vec<usize> {
        self.fields.iter().map(|f| f.quantizer.vocab_size()).collect()
    }

    /// Position of a schema column among the quantized fields.
    pub fn field_of_column(&self, column: usize) -> Option<usize> {
        self.fields.iter().position(|f| f.column == column)
    }

    pub fn quantize(&self, data: &TabularDataset) -> TokenMatrix {
        let n = data.n_rows();
        let mut out = Array2::zeros((n, self.fields.len()));
        for (f, field) in self.fields.iter().enumerate() {
            let col = data.column(field.column);
            for i in 0..n {
                out[[i, f]] = field.quantizer.token_of(col.cell(i));
            }
        }
        out
    }

    /// Rebuilds a dataset from tokens: numeric tokens decode to bin centers,
    /// categorical tokens to their category. Id columns (and unseen tokens)
    /// are copied from `template`, which must have the same row count.
    pub fn decode(&self, tokens: &TokenMatrix, template: &TabularDataset) -> TabularDataset {
        assert_eq!(tokens.nrows(), template.n_rows());
        let mut columns = template.columns().to_vec();
        for (f, field) in self.fields.iter().enumerate() {
            match &mut columns[field.column] {
                Column::Continuous(v) => {
                    for (i, x) in v.iter_mut().enumerate() {
                        *x = field.quantizer.bin_center(tokens[[i, f]]).expect("numeric field");
                    }
                }
                Column::Categorical(v) => {
                    for (i, s) in v.iter_mut().enumerate() {
                        if let Some(c) = field.quantizer.category(tokens[[i, f]]) {
                            *s = c.to_string();
                        }
                    }
                }
            }
        }
        TabularDataset::from_columns(template.schema().clone(), columns, template.origin.clone())
            .expect("decoded columns keep the template layout")
    }
}
