use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::model::{AuditReport, Disclosure, ReportMetadata, WarningMessage};
use crate::aggregation::{CheckpointSelection, DimensionIndexSummary, ModelSummary, Polarity, Split, TrustDimension};
use crate::error::{AuditError, Result};

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileView {
    pub name: String,
    pub notation: String,
    pub weights: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexCell {
    pub mean: f64,
    pub deviation: f64,
    /// `mean (deviation)` at two decimals.
    pub cell: String,
}

impl IndexCell {
    fn new(mean: f64, deviation: f64) -> Self {
        IndexCell {
            mean: round4(mean),
            deviation: round4(deviation),
            cell: format!("{mean:.2} ({deviation:.2})"),
        }
    }

    fn from_summary(d: &DimensionIndexSummary) -> Self {
        IndexCell::new(d.mean, d.deviation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedRow {
    pub rank: usize,
    pub model_id: String,
    pub checkpoint_id: u32,
    pub trust: IndexCell,
    pub score: f64,
    pub dimensions: BTreeMap<TrustDimension, IndexCell>,
    #[serde(default)]
    pub selection: Option<CheckpointSelection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingView {
    pub profile: String,
    pub notation: String,
    pub alpha: f64,
    pub entries: Vec<RankedRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionRow {
    pub model_id: String,
    pub checkpoint_id: u32,
    pub dimensions: BTreeMap<TrustDimension, IndexCell>,
}

/// Per-fold raw values of one metric at full precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRow {
    pub model_id: String,
    pub checkpoint_id: u32,
    pub metric: String,
    pub dimension: TrustDimension,
    pub polarity: Polarity,
    pub split: Split,
    pub folds: Vec<usize>,
    pub values: Vec<Option<f64>>,
}

/// The serialized form of an [`AuditReport`]: ranked tables at four
/// decimals, the metric breakdown at full precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub format_version: u32,
    pub metadata: ReportMetadata,
    pub profiles: Vec<ProfileView>,
    pub rankings: Vec<RankingView>,
    pub dimension_tables: Vec<DimensionRow>,
    pub breakdown: Vec<BreakdownRow>,
    pub warnings: Vec<WarningMessage>,
    pub disclosures: Vec<Disclosure>,
}

fn dimension_cells(s: &ModelSummary) -> BTreeMap<TrustDimension, IndexCell> {
    s.dimensions
        .iter()
        .map(|d| (d.dimension, IndexCell::from_summary(d)))
        .collect()
}

fn breakdown(report: &AuditReport) -> Vec<BreakdownRow> {
    let mut rows: BTreeMap<(&str, u32, Split, TrustDimension, &str), BreakdownRow> = BTreeMap::new();
    for r in &report.records {
        let c = &r.context;
        let row = rows
            .entry((&c.model_id, c.checkpoint_id, r.split, r.dimension, &r.metric))
            .or_insert_with(|| BreakdownRow {
                model_id: c.model_id.clone(),
                checkpoint_id: c.checkpoint_id,
                metric: r.metric.clone(),
                dimension: r.dimension,
                polarity: r.polarity,
                split: r.split,
                folds: Vec::new(),
                values: Vec::new(),
            });
        row.folds.push(c.fold_id);
        row.values.push(r.value);
    }
    rows.into_values().collect()
}

impl ReportDocument {
    pub fn from_report(report: &AuditReport) -> Self {
        ReportDocument {
            format_version: report.format_version,
            metadata: report.metadata.clone(),
            profiles: report
                .profiles
                .iter()
                .map(|p| ProfileView {
                    name: p.name.clone(),
                    notation: p.notation(),
                    weights: p.weights.map(round4),
                })
                .collect(),
            rankings: report
                .rankings
                .iter()
                .map(|r| RankingView {
                    profile: r.profile.name.clone(),
                    notation: r.profile.notation(),
                    alpha: r.alpha,
                    entries: r
                        .entries
                        .iter()
                        .map(|e| RankedRow {
                            rank: e.rank,
                            model_id: e.summary.model_id.clone(),
                            checkpoint_id: e.summary.checkpoint_id,
                            trust: IndexCell::new(e.tau_mean, e.tau_deviation),
                            score: round4(e.score),
                            dimensions: dimension_cells(&e.summary),
                            selection: e.selection.clone(),
                        })
                        .collect(),
                })
                .collect(),
            dimension_tables: report
                .dimension_tables
                .iter()
                .map(|s| DimensionRow {
                    model_id: s.model_id.clone(),
                    checkpoint_id: s.checkpoint_id,
                    dimensions: dimension_cells(s),
                })
                .collect(),
            breakdown: breakdown(report),
            warnings: report.warnings.clone(),
            disclosures: report.disclosures.clone(),
        }
    }
}

pub fn render_json(report: &AuditReport) -> Result<String> {
    let mut text =
        serde_json::to_string_pretty(&ReportDocument::from_report(report)).map_err(|source| AuditError::Json {
            context: "report".into(),
            source,
        })?;
    text.push('\n');
    Ok(text)
}

fn medal(rank: usize) -> &'static str {
    match rank {
        1 => "🥇 ",
        2 => "🥈 ",
        3 => "🥉 ",
        _ => "",
    }
}

fn cell_or_na(cells: &BTreeMap<TrustDimension, IndexCell>, dim: TrustDimension) -> String {
    cells.get(&dim).map_or_else(|| "n/a".to_string(), |c| c.cell.clone())
}

fn split_label(s: Split) -> &'static str {
    match s {
        Split::Val => "val",
        Split::Test => "test",
        Split::None => "-",
    }
}

pub fn render_markdown(report: &AuditReport) -> String {
    let doc = ReportDocument::from_report(report);
    let m = &doc.metadata;
    let mut s = String::new();
    let _ = writeln!(s, "# Trustworthiness audit: {}\n", m.dataset_id);

    s.push_str("## Metadata\n\n");
    let _ = writeln!(s, "- Tool: {} {}", m.tool, m.version);
    if let Some(at) = &m.generated_at {
        let _ = writeln!(s, "- Generated at: {at}");
    }
    let _ = writeln!(s, "- Config digest: `{}`", m.config_digest);
    let _ = writeln!(s, "- Base seed: {}", m.base_seed);
    let r = &m.real_data;
    let _ = writeln!(
        s,
        "- Real data: `{}` ({} rows, {} dropped, {} columns)",
        r.path,
        r.rows,
        r.dropped_rows,
        r.columns.len()
    );
    let _ = writeln!(s, "- Target: `{}` (positive class `{}`)", r.target, r.positive_value);
    let _ = writeln!(
        s,
        "- Protected attribute: `{}` (privileged `{}`)",
        r.protected, r.privileged_value
    );
    let _ = writeln!(
        s,
        "- Split ratios: train {}, val {}, test {}",
        m.ratios.train, m.ratios.val, m.ratios.test
    );
    let _ = writeln!(s, "- Uncertainty penalty α: {}", m.alpha);
    let _ = writeln!(
        s,
        "- Validation-split records: {}",
        if m.validation_records { "yes" } else { "no" }
    );
    s.push_str("\n| Fold | Seed | Train | Val | Test |\n|---|---|---|---|---|\n");
    for f in &m.folds {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} |",
            f.fold_id, f.seed, f.train_rows, f.val_rows, f.test_rows
        );
    }
    s.push_str("\n| Model | Source | Checkpoints |\n|---|---|---|\n");
    for model in &m.models {
        let cks: Vec<String> = model.checkpoints.iter().map(u32::to_string).collect();
        let _ = writeln!(s, "| {} | {} | {} |", model.model_id, model.source, cks.join(", "));
    }

    s.push_str("\n## Profiles\n\n| Profile | Weights (F,P,U,Fair,R) |\n|---|---|\n");
    for p in &doc.profiles {
        let _ = writeln!(s, "| {} | {} |", p.name, p.notation);
    }

    s.push_str("\n## Ranked Lists\n");
    for ranking in &doc.rankings {
        let _ = writeln!(s, "\n### {} {}\n", ranking.profile, ranking.notation);
        s.push_str("| Rank | Model | Checkpoint | τ̄ (Δ) | Score |\n|---|---|---|---|---|\n");
        for e in &ranking.entries {
            let _ = writeln!(
                s,
                "| {}{} | {} | {} | {} | {:.4} |",
                medal(e.rank),
                e.rank,
                e.model_id,
                e.checkpoint_id,
                e.trust.cell,
                e.score
            );
        }
    }

    s.push_str("\n## Dimension Index Tables\n\n| Model | Checkpoint |");
    for d in TrustDimension::ALL {
        let _ = write!(s, " {d} |");
    }
    s.push_str("\n|---|---|---|---|---|---|---|\n");
    for row in &doc.dimension_tables {
        let _ = write!(s, "| {} | {} |", row.model_id, row.checkpoint_id);
        for d in TrustDimension::ALL {
            let _ = write!(s, " {} |", cell_or_na(&row.dimensions, d));
        }
        s.push('\n');
    }

    s.push_str(
        "\n## Metric Breakdown\n\nRaw values per fold at four decimals (the JSON report keeps full precision).\n",
    );
    let mut current: Option<(&str, u32)> = None;
    for b in &doc.breakdown {
        if current != Some((&b.model_id, b.checkpoint_id)) {
            current = Some((&b.model_id, b.checkpoint_id));
            let _ = writeln!(s, "\n### {} (checkpoint {})\n", b.model_id, b.checkpoint_id);
            s.push_str("| Metric | Dimension | Polarity | Split | Values by fold |\n|---|---|---|---|---|\n");
        }
        let values: Vec<String> = b
            .folds
            .iter()
            .zip(&b.values)
            .map(|(f, v)| match v {
                Some(v) => format!("{f}: {v:.4}"),
                None => format!("{f}: missing"),
            })
            .collect();
        let _ = writeln!(
            s,
            "| {} | {} | {:+} | {} | {} |",
            b.metric,
            b.dimension,
            b.polarity.sign() as i8,
            split_label(b.split),
            values.join(", ")
        );
    }

    s.push_str("\n## Warnings\n\n");
    if doc.warnings.is_empty() {
        s.push_str("None.\n");
    }
    for w in &doc.warnings {
        let _ = writeln!(s, "- **{}** `{}`: {}", w.severity.label(), w.code, w.text);
    }

    s.push_str("\n## Design-Decision Disclosure\n\n");
    for d in &doc.disclosures {
        let _ = writeln!(s, "- **{}**: {}", d.topic, d.text);
    }
    s
}
