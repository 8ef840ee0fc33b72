use std::collections::HashMap;
use std::path::Path;

use ndarray::Array2;

use super::embedder::FeatureMap;
use crate::data::TabularDataset;
use crate::error::{AuditError, Result};
use crate::Matrix;

/// Embeddings computed elsewhere, keyed by row id. The CSV holds a header,
/// the row id in the first column and `d` floats after it. Rows are looked
/// up through the dataset's first id column.
#[derive(Debug, Clone)]
pub struct PrecomputedEmbedding {
    vectors: HashMap<String, Vec<f64>>,
    dim: usize,
}

impl PrecomputedEmbedding {
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| AuditError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read(file)
    }

    pub fn read<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let dim = rdr
            .headers()
            .map_err(|source| AuditError::Csv {
                path: "<embeddings>".into(),
                source,
            })?
            .len()
            .checked_sub(1)
            .filter(|&d| d > 0)
            .ok_or_else(|| AuditError::invalid("embedding file needs an id column and at least one feature"))?;
        let mut vectors = HashMap::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|source| AuditError::Csv {
                path: "<embeddings>".into(),
                source,
            })?;
            let values = record
                .iter()
                .skip(1)
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| AuditError::invalid(format!("embedding row {}: {e}", line + 1)))?;
            vectors.insert(record[0].trim().to_string(), values);
        }
        Ok(PrecomputedEmbedding { vectors, dim })
    }
}

impl FeatureMap for PrecomputedEmbedding {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, data: &TabularDataset) -> Result<Matrix> {
        let schema = data.schema();
        let id = schema
            .id_columns
            .first()
            .and_then(|name| data.column_by_name(name))
            .and_then(|c| c.as_categorical())
            .ok_or_else(|| AuditError::invalid("precomputed embeddings need a categorical id column"))?;
        let mut out = Array2::zeros((data.n_rows(), self.dim));
        for (i, key) in id.iter().enumerate() {
            let v = self
                .vectors
                .get(key)
                .ok_or_else(|| AuditError::invalid(format!("no embedding for row id {key}")))?;
            out.row_mut(i).assign(&ndarray::ArrayView1::from(v.as_slice()));
        }
        Ok(out)
    }
}
