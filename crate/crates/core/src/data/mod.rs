//! Tabular data: schema, CSV ingestion, fold splitting, quantization and
//! canonical row hashing.

mod dataset;
mod folds;
mod hash;
mod labels;
mod quantize;
mod schema;

pub use dataset::{Column, Origin, TabularDataset};
pub use folds::{split_folds, split_indices, FoldSplit, SplitRatios};
pub use hash::{canonical_row_hash, Cell};
pub use labels::BinaryTask;
pub use quantize::{fit_quantizer, FieldQuantizer, QuantizedField, Quantizer, TokenMatrix};
pub use schema::{ColumnKind, ColumnSpec, DatasetSchema, ProtectedSpec};
