use std::io::{Read, Write};
use std::path::Path;

use super::hash::{canonical_row_hash, Cell};
use super::schema::{ColumnKind, DatasetSchema};
use crate::error::{AuditError, Result};

/// Values of one column, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Categorical(Vec<String>),
    Continuous(Vec<f64>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Categorical(v) => v.len(),
            Column::Continuous(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> ColumnKind {
        match self {
            Column::Categorical(_) => ColumnKind::Categorical,
            Column::Continuous(_) => ColumnKind::Continuous,
        }
    }

    pub fn cell(&self, row: usize) -> Cell<'_> {
        match self {
            Column::Categorical(v) => Cell::Cat(&v[row]),
            Column::Continuous(v) => Cell::Num(v[row]),
        }
    }

    pub fn as_categorical(&self) -> Option<&[String]> {
        match self {
            Column::Categorical(v) => Some(v),
            Column::Continuous(_) => None,
        }
    }

    pub fn as_continuous(&self) -> Option<&[f64]> {
        match self {
            Column::Continuous(v) => Some(v),
            Column::Categorical(_) => None,
        }
    }

    fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Categorical(v) => Column::Categorical(rows.iter().map(|&i| v[i].clone()).collect()),
            Column::Continuous(v) => Column::Continuous(rows.iter().map(|&i| v[i]).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Real,
    Synthetic {
        model_id: String,
        fold_id: usize,
        checkpoint_id: u32,
    },
}

/// Typed rows conforming to a [`DatasetSchema`].
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    schema: DatasetSchema,
    columns: Vec<Column>,
    n_rows: usize,
    dropped_rows: usize,
    pub origin: Origin,
}

const MISSING_MARKERS: [&str; 3] = ["", "NA", "?"];

fn is_missing(field: &str) -> bool {
    MISSING_MARKERS.contains(&field)
}

impl TabularDataset {
    /// Builds a dataset from column vectors, checking kinds and lengths.
    pub fn from_columns(schema: DatasetSchema, columns: Vec<Column>, origin: Origin) -> Result<Self> {
        schema.validate()?;
        if columns.len() != schema.columns.len() {
            return Err(AuditError::DimensionMismatch {
                expected: schema.columns.len(),
                got: columns.len(),
            });
        }
        let n_rows = columns[0].len();
        for (spec, col) in schema.columns.iter().zip(&columns) {
            if spec.kind != col.kind() {
                return Err(AuditError::Schema(format!("column {} has the wrong kind", spec.name)));
            }
            if col.len() != n_rows {
                return Err(AuditError::DimensionMismatch {
                    expected: n_rows,
                    got: col.len(),
                });
            }
            if let Column::Continuous(v) = col {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(AuditError::Schema(format!(
                        "column {} has non-finite values",
                        spec.name
                    )));
                }
            }
        }
        if n_rows == 0 {
            return Err(AuditError::NoRows { dropped: 0 });
        }
        Ok(TabularDataset {
            schema,
            columns,
            n_rows,
            dropped_rows: 0,
            origin,
        })
    }

    /// Reads a CSV file with a header row. Rows with missing (`""`, `NA`,
    /// `?`) or unparseable cells are dropped and counted.
    pub fn load_csv(path: &Path, schema: &DatasetSchema) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| AuditError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_csv(file, schema, Origin::Real).map_err(|e| match e {
            AuditError::Csv { source, .. } => AuditError::Csv {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        })
    }

    pub fn read_csv<R: Read>(reader: R, schema: &DatasetSchema, origin: Origin) -> Result<Self> {
        schema.validate()?;
        let csv_err = |source| AuditError::Csv {
            path: "<reader>".into(),
            source,
        };
        let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
        let header: Vec<String> = rdr
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        let expected = schema.names();
        let mut sorted_header = header.clone();
        sorted_header.sort();
        let mut sorted_expected = expected.clone();
        sorted_expected.sort();
        if sorted_header != sorted_expected {
            return Err(AuditError::HeaderMismatch {
                expected,
                found: header,
            });
        }
        let positions: Vec<usize> = expected
            .iter()
            .map(|name| header.iter().position(|h| h == name).expect("same name set"))
            .collect();

        let mut columns: Vec<Column> = schema
            .columns
            .iter()
            .map(|c| match c.kind {
                ColumnKind::Categorical => Column::Categorical(Vec::new()),
                ColumnKind::Continuous => Column::Continuous(Vec::new()),
            })
            .collect();
        let mut dropped = 0;
        let mut parsed: Vec<Option<f64>> = vec![None; columns.len()];
        for record in rdr.records() {
            let record = record.map_err(csv_err)?;
            if record.len() != header.len() {
                dropped += 1;
                continue;
            }
            let mut ok = true;
            for (j, spec) in schema.columns.iter().enumerate() {
                let field = record[positions[j]].trim();
                if is_missing(field) {
                    ok = false;
                    break;
                }
                if spec.kind == ColumnKind::Continuous {
                    match field.parse::<f64>() {
                        Ok(v) if v.is_finite() => parsed[j] = Some(v),
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            if !ok {
                dropped += 1;
                continue;
            }
            for (j, col) in columns.iter_mut().enumerate() {
                match col {
                    Column::Categorical(v) => v.push(record[positions[j]].trim().to_string()),
                    Column::Continuous(v) => v.push(parsed[j].expect("parsed above")),
                }
            }
        }
        let n_rows = columns[0].len();
        if n_rows == 0 {
            return Err(AuditError::NoRows { dropped });
        }
        Ok(TabularDataset {
            schema: schema.clone(),
            columns,
            n_rows,
            dropped_rows: dropped,
            origin,
        })
    }

    /// Writes the dataset as CSV with a header row, continuous values in
    /// shortest round-trip form.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let csv_err = |source| AuditError::Csv {
            path: "<writer>".into(),
            source,
        };
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.schema.columns.iter().map(|c| c.name.as_str()))
            .map_err(csv_err)?;
        let mut row: Vec<String> = Vec::with_capacity(self.columns.len());
        for i in 0..self.n_rows {
            row.clear();
            for col in &self.columns {
                row.push(match col {
                    Column::Categorical(v) => v[i].clone(),
                    Column::Continuous(v) => format!("{}", v[i]),
                });
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|source| AuditError::Io {
            path: "<writer>".into(),
            source,
        })?;
        Ok(())
    }

    pub fn schema(&self) -> &DatasetSchema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn dropped_rows(&self) -> usize {
        self.dropped_rows
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, index: usize) -> &Column {
        &self.columns[index]
    }

    pub fn column_by_name(&self, name: &str) -> Option<&Column> {
        self.schema.column_index(name).map(|i| &self.columns[i])
    }

    /// New dataset holding the given rows (in the given order).
    pub fn select_rows(&self, rows: &[usize]) -> TabularDataset {
        TabularDataset {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            n_rows: rows.len(),
            dropped_rows: 0,
            origin: self.origin.clone(),
        }
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    /// Cells of row `i` over the non-id columns.
    pub fn metric_cells(&self, i: usize) -> Vec<Cell<'_>> {
        self.schema
            .metric_columns()
            .into_iter()
            .map(|j| self.columns[j].cell(i))
            .collect()
    }

    /// Canonical hash of every row over the non-id columns.
    pub fn row_hashes(&self) -> Vec<u64> {
        let cols = self.schema.metric_columns();
        let mut cells = Vec::with_capacity(cols.len());
        (0..self.n_rows)
            .map(|i| {
                cells.clear();
                cells.extend(cols.iter().map(|&j| self.columns[j].cell(i)));
                canonical_row_hash(&cells)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ColumnSpec, ProtectedSpec};

    fn schema() -> DatasetSchema {
        DatasetSchema::new(
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
        .unwrap()
    }

    #[test]
    fn reads_valid_rows() {
        let text = "x,g,y\n1.5,a,1\n2,b,0\n-3e2,a,0\n";
        let d = TabularDataset::read_csv(text.as_bytes(), &schema(), Origin::Real).unwrap();
        assert_eq!(d.n_rows(), 3);
        assert_eq!(d.dropped_rows(), 0);
        assert_eq!(d.column(0).as_continuous().unwrap(), &[1.5, 2.0, -300.0]);
    }

    #[test]
    fn reorders_columns_to_schema_order() {
        let text = "y,x,g\n1,1.5,a\n";
        let d = TabularDataset::read_csv(text.as_bytes(), &schema(), Origin::Real).unwrap();
        assert_eq!(d.column(1).as_categorical().unwrap(), &["a".to_string()]);
    }

    #[test]
    fn drops_missing_and_unparseable() {
        let text = "x,g,y\n1,a,1\nNA,a,0\nabc,b,1\n2,?,1\n3,b\n4,b,0\n";
        let d = TabularDataset::read_csv(text.as_bytes(), &schema(), Origin::Real).unwrap();
        assert_eq!(d.n_rows(), 2);
        assert_eq!(d.dropped_rows(), 4);
    }

    #[test]
    fn all_rows_missing_target_is_an_error() {
        let text = "x,g,y\n1,a,\n2,b,NA\n";
        let err = TabularDataset::read_csv(text.as_bytes(), &schema(), Origin::Real).unwrap_err();
        assert!(err.to_string().contains("zero surviving rows"));
    }

    #[test]
    fn header_mismatch_is_an_error() {
        let text = "x,g,z\n1,a,1\n";
        assert!(matches!(
            TabularDataset::read_csv(text.as_bytes(), &schema(), Origin::Real),
            Err(AuditError::HeaderMismatch { .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let text = "x,g,y\n0.1,a,1\n2,b,0\n";
        let d = TabularDataset::read_csv(text.as_bytes(), &schema(), Origin::Real).unwrap();
        let mut out = Vec::new();
        d.write_csv(&mut out).unwrap();
        let back = TabularDataset::read_csv(out.as_slice(), &schema(), Origin::Real).unwrap();
        assert_eq!(d, back);
    }
}
