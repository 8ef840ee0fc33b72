use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::aggregation::{parse_profiles, preset_profiles, TrustProfile};
use crate::data::SplitRatios;
use crate::downstream::{AttackConfig, ClassifierSpec, LogisticSpec, MlpSpec};
use crate::error::{AuditError, Result};
use crate::synthgen::GeneratorSpec;

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "TRUST_AUDIT_THREADS";
const DEFAULT_THREADS: usize = 4;

/// One JSON document describing a full audit. Relative paths are resolved
/// against `base_dir` (the config file's directory when loaded from disk).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub data: DataConfig,
    #[serde(default)]
    pub folds: FoldConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    /// Preset names, an inline `name → weights` map, or a path to a profile
    /// file. Defaults to every preset.
    #[serde(default)]
    pub profiles: Option<serde_json::Value>,
    #[serde(default)]
    pub ranking: RankingConfig,
    #[serde(default)]
    pub warnings: WarningThresholds,
    #[serde(default)]
    pub seeds: SeedConfig,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default = "default_dataset_id")]
    pub dataset_id: String,
    pub real: PathBuf,
    pub schema: PathBuf,
    /// Precomputed embeddings of the real rows (keyed by the first id
    /// column). When set, every synthetic file needs its own as well.
    #[serde(default)]
    pub real_embeddings: Option<PathBuf>,
    pub synthetic: Vec<SyntheticSource>,
}

fn default_dataset_id() -> String {
    "dataset".into()
}

/// A candidate generator: either a built-in generator run on every fold's
/// training split, or files produced elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSource {
    pub model_id: String,
    #[serde(default)]
    pub generator: Option<GeneratorSpec>,
    /// Rows to generate (default: the fold's training size).
    #[serde(default)]
    pub rows: Option<usize>,
    #[serde(default)]
    pub files: Vec<SyntheticFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticFile {
    /// Fold the file was generated from; `None` uses it for every fold.
    #[serde(default)]
    pub fold: Option<usize>,
    #[serde(default)]
    pub checkpoint: u32,
    pub path: PathBuf,
    #[serde(default)]
    pub embeddings: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FoldConfig {
    pub num_folds: usize,
    pub ratios: SplitRatios,
}

impl Default for FoldConfig {
    fn default() -> Self {
        FoldConfig {
            num_folds: 5,
            ratios: SplitRatios::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub bins: usize,
    pub rff_features: usize,
    pub bandwidth_subsample: usize,
    pub permutations: usize,
    pub precision_recall_k: usize,
    pub knn_exact_threshold: usize,
    pub classifiers: Vec<ClassifierSpec>,
    /// Seeds `0..mlp_seeds` for every MLP classifier.
    pub mlp_seeds: u64,
    pub attack: AttackConfig,
    /// Also evaluate downstream metrics on the validation split. `None`
    /// turns this on only when some model has several checkpoints.
    pub emit_validation: Option<bool>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            bins: 10,
            rff_features: 512,
            bandwidth_subsample: 1000,
            permutations: 200,
            precision_recall_k: 3,
            knn_exact_threshold: 50_000,
            classifiers: vec![
                ClassifierSpec::LogisticRegression(LogisticSpec::default()),
                ClassifierSpec::Knn { k: 1 },
                ClassifierSpec::Mlp(MlpSpec::default()),
            ],
            mlp_seeds: 5,
            attack: AttackConfig::default(),
            emit_validation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankingConfig {
    pub alpha: f64,
}

impl Default for RankingConfig {
    fn default() -> Self {
        RankingConfig { alpha: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WarningThresholds {
    /// Warn when a fold's replicated-row count exceeds this.
    pub replicated_rows_max: u64,
    pub privacy_index_min: f64,
    pub fairness_index_min: f64,
}

impl Default for WarningThresholds {
    fn default() -> Self {
        WarningThresholds {
            replicated_rows_max: 0,
            privacy_index_min: 0.2,
            fairness_index_min: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SeedConfig {
    pub base: u64,
}

fn config_err(msg: impl Into<String>) -> AuditError {
    AuditError::InvalidArgument(msg.into())
}

impl AuditConfig {
    pub fn from_json_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: AuditConfig = serde_json::from_str(text).map_err(|source| AuditError::Json {
            context: "audit config".into(),
            source,
        })?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| AuditError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json_str(&text, base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.data.synthetic.is_empty() {
            return Err(config_err("data.synthetic lists no candidates"));
        }
        let mut ids: Vec<&str> = self.data.synthetic.iter().map(|s| s.model_id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(config_err("synthetic model ids must be unique"));
        }
        for s in &self.data.synthetic {
            match (&s.generator, s.files.is_empty()) {
                (Some(_), false) | (None, true) => {
                    return Err(config_err(format!(
                        "synthetic source {} needs exactly one of `generator` or `files`",
                        s.model_id
                    )))
                }
                _ => {}
            }
            if self.data.real_embeddings.is_some() && s.files.iter().any(|f| f.embeddings.is_none()) {
                return Err(config_err(format!("synthetic source {} lacks embeddings", s.model_id)));
            }
            if self.data.real_embeddings.is_some() && s.generator.is_some() {
                return Err(config_err(
                    "precomputed embeddings cannot be combined with built-in generators",
                ));
            }
            for f in &s.files {
                if f.fold.is_some_and(|k| k >= self.folds.num_folds) {
                    return Err(config_err(format!("{}: fold {:?} out of range", s.model_id, f.fold)));
                }
            }
        }
        if self.folds.num_folds == 0 {
            return Err(config_err("folds.num_folds must be at least 1"));
        }
        self.folds.ratios.validate().map_err(|e| config_err(e.to_string()))?;
        let m = &self.metrics;
        if m.bins < 2 || m.rff_features == 0 || m.permutations == 0 || m.precision_recall_k == 0 {
            return Err(config_err(
                "metrics: bins ≥ 2, rff_features, permutations and precision_recall_k ≥ 1",
            ));
        }
        if m.classifiers.is_empty() {
            return Err(config_err("metrics.classifiers is empty"));
        }
        if m.classifiers.iter().any(|c| matches!(c, ClassifierSpec::Mlp(_))) && m.mlp_seeds == 0 {
            return Err(config_err("metrics.mlp_seeds must be at least 1"));
        }
        m.attack.validate().map_err(|e| config_err(e.to_string()))?;
        if !(self.ranking.alpha >= 0.0 && self.ranking.alpha.is_finite()) {
            return Err(config_err("ranking.alpha must be a finite value ≥ 0"));
        }
        if self.threads == Some(0) {
            return Err(config_err("threads must be at least 1"));
        }
        self.resolve_profiles()?;
        Ok(())
    }

    pub fn resolve_profiles(&self) -> Result<Vec<TrustProfile>> {
        let presets = preset_profiles();
        let profiles = match &self.profiles {
            None => presets,
            Some(serde_json::Value::Array(names)) => names
                .iter()
                .map(|n| {
                    let n = n
                        .as_str()
                        .ok_or_else(|| config_err("profiles array must hold preset names"))?;
                    presets
                        .iter()
                        .find(|p| p.name == n)
                        .cloned()
                        .ok_or_else(|| config_err(format!("unknown preset profile {n}")))
                })
                .collect::<Result<_>>()?,
            Some(v @ serde_json::Value::Object(_)) => parse_profiles(&v.to_string())?,
            Some(serde_json::Value::String(path)) => crate::aggregation::load_profiles(&self.resolve(Path::new(path)))?,
            Some(_) => return Err(config_err("profiles must be a list of presets, a map or a file path")),
        };
        if profiles.is_empty() {
            return Err(config_err("no profiles configured"));
        }
        Ok(profiles)
    }

    /// Worker count: the environment override, else `threads`, else 4.
    pub fn worker_count(&self) -> Result<usize> {
        match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| config_err(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
            Err(_) => Ok(self.threads.unwrap_or(DEFAULT_THREADS)),
        }
    }

    /// SHA-256 of the config's canonical JSON serialization.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn has_multiple_checkpoints(&self) -> bool {
        self.data.synthetic.iter().any(|s| {
            let mut cks: Vec<u32> = s.files.iter().map(|f| f.checkpoint).collect();
            cks.sort_unstable();
            cks.dedup();
            cks.len() > 1
        })
    }
}
