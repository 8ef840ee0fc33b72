use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Categorical,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtectedSpec {
    pub column: String,
    pub privileged_value: String,
}

/// Column layout of a dataset plus the roles of its columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub columns: Vec<ColumnSpec>,
    pub target: String,
    pub protected: ProtectedSpec,
    #[serde(default)]
    pub id_columns: Vec<String>,
}

impl DatasetSchema {
    pub fn new(
        columns: Vec<ColumnSpec>,
        target: impl Into<String>,
        protected: ProtectedSpec,
        id_columns: Vec<String>,
    ) -> Result<Self> {
        let schema = DatasetSchema {
            columns,
            target: target.into(),
            protected,
            id_columns,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let schema: DatasetSchema = serde_json::from_str(text).map_err(|source| AuditError::Json {
            context: "schema".into(),
            source,
        })?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| AuditError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// Checks name uniqueness and column roles. Observed-value requirements
    /// are checked when the label encoding is fit on real data.
    pub fn validate(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(AuditError::Schema("no columns".into()));
        }
        let mut seen = HashSet::new();
        for c in &self.columns {
            if c.name.is_empty() {
                return Err(AuditError::Schema("empty column name".into()));
            }
            if !seen.insert(c.name.as_str()) {
                return Err(AuditError::Schema(format!("duplicate column {}", c.name)));
            }
        }
        for (role, name) in [("target", &self.target), ("protected", &self.protected.column)] {
            match self.column_index(name) {
                None => return Err(AuditError::Schema(format!("{role} column {name} not found"))),
                Some(i) if self.columns[i].kind != ColumnKind::Categorical => {
                    return Err(AuditError::Schema(format!("{role} column {name} must be categorical")))
                }
                _ => {}
            }
        }
        if self.target == self.protected.column {
            return Err(AuditError::Schema("target and protected column must differ".into()));
        }
        for id in &self.id_columns {
            if self.column_index(id).is_none() {
                return Err(AuditError::Schema(format!("id column {id} not found")));
            }
            if *id == self.target || *id == self.protected.column {
                return Err(AuditError::Schema(format!(
                    "{id} cannot be both an id and a task column"
                )));
            }
        }
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn target_index(&self) -> usize {
        self.column_index(&self.target).expect("validated schema")
    }

    pub fn protected_index(&self) -> usize {
        self.column_index(&self.protected.column).expect("validated schema")
    }

    pub fn is_id(&self, index: usize) -> bool {
        self.id_columns.iter().any(|n| *n == self.columns[index].name)
    }

    /// Indices of columns that take part in metrics (everything but ids).
    pub fn metric_columns(&self) -> Vec<usize> {
        (0..self.columns.len()).filter(|&i| !self.is_id(i)).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: &str = r#"{
        "columns": [
            {"name": "id", "kind": "categorical"},
            {"name": "age", "kind": "continuous"},
            {"name": "sex", "kind": "categorical"},
            {"name": "y", "kind": "categorical"}
        ],
        "target": "y",
        "protected": {"column": "sex", "privileged_value": "M"},
        "id_columns": ["id"]
    }"#;

    #[test]
    fn parses_and_reports_roles() {
        let s = DatasetSchema::from_json_str(SCHEMA).unwrap();
        assert_eq!(s.target_index(), 3);
        assert_eq!(s.protected_index(), 2);
        assert_eq!(s.metric_columns(), vec![1, 2, 3]);
    }

    #[test]
    fn rejects_continuous_target_and_duplicates() {
        let bad = SCHEMA.replace(r#""target": "y""#, r#""target": "age""#);
        assert!(DatasetSchema::from_json_str(&bad).is_err());
        let dup = SCHEMA.replace(r#""name": "age""#, r#""name": "sex""#);
        assert!(DatasetSchema::from_json_str(&dup).is_err());
    }
}
