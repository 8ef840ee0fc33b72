use std::collections::BTreeMap;

use ndarray::{concatenate, Axis};
use rayon::prelude::*;

use super::config::{AuditConfig, MetricsConfig, SyntheticFile, SyntheticSource};
use super::model::{
    AuditReport, Disclosure, FoldSummary, ModelInfo, RealDataSummary, ReportMetadata, Severity, WarningMessage,
    REPORT_FORMAT_VERSION,
};
use super::warnings::evaluate_warnings;
use crate::aggregation::{rank_models, summarize_models, MetricRecord, ModelSummary, RecordContext, Split};
use crate::data::{split_folds, BinaryTask, FoldSplit, Origin, Quantizer, TabularDataset, TokenMatrix};
use crate::downstream::{
    attack_all, classification_scores, fairness_metrics, robustness_metrics, train_classifier, AttackConfig,
    ClassifierSpec, PredictionSet, TokenEmbeddings, TokenFeaturizer,
};
use crate::embedding::{fit_embedder, median_heuristic_bandwidth, Embedder, FeatureMap, PrecomputedEmbedding, RffMap};
use crate::error::{AuditError, Result};
use crate::fidelity::{
    chi_squared_per_field, frechet_distance, knn_precision_recall, mi_l2_difference, mmd_permutation_pvalue,
    mmd_witness_snr,
};
use crate::neighbors::{Euclidean, Hamming, KnnConfig};
use crate::privacy::{knn_distance_stats, replicated_rows, PRIVACY_KS};
use crate::seed;
use crate::synthgen::GeneratorSpec;
use crate::Matrix;

/// Loads the configured real data and runs the audit on a dedicated pool of
/// [`AuditConfig::worker_count`] threads.
pub fn run_audit(config: &AuditConfig) -> Result<AuditReport> {
    config.validate()?;
    let schema_path = config.resolve(&config.data.schema);
    let real_path = config.resolve(&config.data.real);
    let real = crate::data::DatasetSchema::load(&schema_path)
        .and_then(|schema| TabularDataset::load_csv(&real_path, &schema))
        .map_err(|e| e.in_stage("load real data"))?;
    run_audit_with_data(config, real, &config.data.real.display().to_string())
}

/// Runs the audit on an already loaded real dataset; `data.real` and
/// `data.schema` in `config` are not read. `real_label` is echoed in the
/// report metadata.
pub fn run_audit_with_data(config: &AuditConfig, real: TabularDataset, real_label: &str) -> Result<AuditReport> {
    config.validate()?;
    let threads = config.worker_count()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| AuditError::Numerical(format!("cannot start worker pool: {e}")))?;
    pool.install(|| audit(config, real, real_label))
}

/// Rows handed to a classifier for evaluation.
struct EvalSplit {
    x: Matrix,
    tokens: TokenMatrix,
    /// Features of the decoded tokens, the clean side of the robustness delta.
    x_tokens: Matrix,
    labels: Vec<u8>,
    privileged: Vec<bool>,
}

/// Real training rows with the quantizer and embedder fitted on them.
struct Reference {
    train: TabularDataset,
    quantizer: Quantizer,
    embedder: Embedder,
    train_tokens: TokenMatrix,
    /// Embedding used for fidelity and embedding-space privacy metrics.
    train_phi: Matrix,
}

impl Reference {
    fn fit(train: TabularDataset, bins: usize, precomputed: Option<&PrecomputedEmbedding>) -> Result<Self> {
        let quantizer = Quantizer::fit(&train, bins)?;
        let embedder = fit_embedder(&train)?;
        let train_tokens = quantizer.quantize(&train);
        let train_phi = match precomputed {
            Some(p) => p.embed(&train)?,
            None => embedder.embed(&train)?,
        };
        Ok(Reference {
            train,
            quantizer,
            embedder,
            train_tokens,
            train_phi,
        })
    }
}

struct FoldContext {
    split: FoldSplit,
    reference: Reference,
    featurizer: TokenFeaturizer<f64>,
    token_embeddings: TokenEmbeddings,
    val: EvalSplit,
    test: EvalSplit,
}

fn eval_split(
    data: &TabularDataset,
    task: &BinaryTask,
    quantizer: &Quantizer,
    embedder: &Embedder,
    featurizer: &TokenFeaturizer<f64>,
) -> Result<EvalSplit> {
    let tokens = quantizer.quantize(data);
    Ok(EvalSplit {
        x: embedder.embed(data)?,
        x_tokens: featurizer.featurize(tokens.view()),
        tokens,
        labels: task.labels(data),
        privileged: task.privileged(data),
    })
}

fn prepare_fold(
    config: &AuditConfig,
    real: &TabularDataset,
    task: &BinaryTask,
    split: FoldSplit,
    precomputed: Option<&PrecomputedEmbedding>,
) -> Result<FoldContext> {
    let reference = Reference::fit(real.select_rows(&split.train), config.metrics.bins, precomputed)?;
    let (quantizer, embedder) = (&reference.quantizer, &reference.embedder);
    let featurizer = TokenFeaturizer::new(quantizer, embedder)?;
    let token_embeddings = TokenEmbeddings::fit(quantizer, reference.train_tokens.view());
    let val = eval_split(&real.select_rows(&split.val), task, quantizer, embedder, &featurizer)?;
    let test = eval_split(&real.select_rows(&split.test), task, quantizer, embedder, &featurizer)?;
    Ok(FoldContext {
        split,
        reference,
        featurizer,
        token_embeddings,
        val,
        test,
    })
}

enum SynthInput<'a> {
    Generate(&'a GeneratorSpec, Option<usize>),
    File(&'a SyntheticFile),
}

struct WorkItem<'a> {
    source: &'a SyntheticSource,
    fold: usize,
    checkpoint: u32,
    input: SynthInput<'a>,
}

fn work_items(config: &AuditConfig) -> Vec<WorkItem<'_>> {
    let mut items = Vec::new();
    for source in &config.data.synthetic {
        let mut mine = Vec::new();
        for fold in 0..config.folds.num_folds {
            if let Some(g) = &source.generator {
                mine.push(WorkItem {
                    source,
                    fold,
                    checkpoint: 0,
                    input: SynthInput::Generate(g, source.rows),
                });
            }
            for f in &source.files {
                if f.fold.is_none_or(|k| k == fold) {
                    mine.push(WorkItem {
                        source,
                        fold,
                        checkpoint: f.checkpoint,
                        input: SynthInput::File(f),
                    });
                }
            }
        }
        mine.sort_by_key(|w| (w.fold, w.checkpoint));
        items.extend(mine);
    }
    items
}

struct Recorder<'a> {
    context: RecordContext,
    out: &'a mut Vec<MetricRecord>,
}

impl Recorder<'_> {
    fn push(&mut self, metric: String, value: Option<f64>, split: Split) {
        self.out
            .push(MetricRecord::registered(metric, value, self.context.clone(), split));
    }
}

fn fidelity_and_privacy(
    m: &MetricsConfig,
    ctx: &Reference,
    synth: &TabularDataset,
    synth_tokens: &TokenMatrix,
    synth_phi: &Matrix,
    item_seed: u64,
    rec: &mut Recorder<'_>,
) -> Result<()> {
    let real_tokens = ctx.train_tokens.view();
    for (f, (field, vocab)) in ctx.quantizer.fields.iter().zip(ctx.quantizer.vocab_sizes()).enumerate() {
        let chi = chi_squared_per_field::<f64>(real_tokens, synth_tokens.view(), f, vocab)?;
        rec.push(format!("ChiSq_{}", field.name), Some(chi), Split::None);
    }
    let mi = mi_l2_difference::<f64>(real_tokens, synth_tokens.view());
    rec.push("MutualInformation_l2".into(), Some(mi), Split::None);

    let pooled = concatenate(Axis(0), &[ctx.train_phi.view(), synth_phi.view()])
        .map_err(|e| AuditError::Numerical(e.to_string()))?;
    let bandwidth = median_heuristic_bandwidth(
        pooled.view(),
        m.bandwidth_subsample,
        seed::derive(item_seed, &[seed::tag("bandwidth")]),
    )?;
    let rff = RffMap::new(
        ctx.train_phi.ncols(),
        m.rff_features,
        bandwidth,
        seed::derive(item_seed, &[seed::tag("rff")]),
    )?;
    let witness = mmd_witness_snr(
        ctx.train_phi.view(),
        synth_phi.view(),
        &rff,
        seed::derive(item_seed, &[seed::tag("halves")]),
    )?;
    let p = mmd_permutation_pvalue(
        &witness.test_real,
        &witness.test_synth,
        m.permutations,
        seed::derive(item_seed, &[seed::tag("permutations")]),
    )?;
    rec.push("MMD_snr".into(), Some(witness.test_snr), Split::None);
    rec.push("MMD_p_value".into(), Some(p), Split::None);
    let fid = frechet_distance(ctx.train_phi.view(), synth_phi.view())?;
    rec.push("FID".into(), Some(fid), Split::None);
    let (precision, recall) = knn_precision_recall(ctx.train_phi.view(), synth_phi.view(), m.precision_recall_k)?;
    rec.push("knnPrecision".into(), Some(precision), Split::None);
    rec.push("knnRecall".into(), Some(recall), Split::None);

    let replicas = replicated_rows(&ctx.train, synth)?;
    rec.push("ReplicatedRows".into(), Some(replicas as f64), Split::None);
    let knn = KnnConfig {
        exact_threshold: m.knn_exact_threshold,
        seed: seed::derive(item_seed, &[seed::tag("knn")]),
        ..KnnConfig::default()
    };
    let raw = knn_distance_stats::<_, _, f64>(real_tokens, synth_tokens.view(), &PRIVACY_KS, &Hamming, &knn)?;
    let emb = knn_distance_stats::<_, _, f64>(ctx.train_phi.view(), synth_phi.view(), &PRIVACY_KS, &Euclidean, &knn)?;
    for (space, stats) in [("NNRaw", raw), ("NNEmb", emb)] {
        for s in stats {
            rec.push(format!("{space}_k{}_mean", s.k), Some(s.mean), Split::None);
            rec.push(format!("{space}_k{}_median", s.k), Some(s.median), Split::None);
        }
    }
    Ok(())
}

/// Every classifier run: `(spec, metric prefix, metric suffix, seed)`.
fn classifier_runs(config: &AuditConfig) -> Vec<(ClassifierSpec, &'static str, String, Option<u64>)> {
    let mut runs = Vec::new();
    for spec in &config.metrics.classifiers {
        match spec {
            ClassifierSpec::Mlp(mlp) => {
                for s in 0..config.metrics.mlp_seeds {
                    let mut mlp = mlp.clone();
                    mlp.seed = s;
                    runs.push((ClassifierSpec::Mlp(mlp), spec.label(), format!("_seed{s}"), Some(s)));
                }
            }
            other => runs.push((other.clone(), other.label(), String::new(), None)),
        }
    }
    runs
}

#[allow(clippy::too_many_arguments)]
fn downstream(
    config: &AuditConfig,
    ctx: &FoldContext,
    task: &BinaryTask,
    synth: &TabularDataset,
    splits: &[Split],
    attack: &AttackConfig,
    out: &mut Vec<MetricRecord>,
    base_context: &RecordContext,
) -> Result<()> {
    let x = ctx.reference.embedder.embed(synth)?;
    let y = task.labels(synth);
    for (spec, label, suffix, cseed) in classifier_runs(config) {
        let stage = format!("train {label}{suffix}");
        let clf =
            train_classifier(&spec, x.view(), &y, ctx.val.x.view(), &ctx.val.labels).map_err(|e| e.in_stage(stage))?;
        let mut rec = Recorder {
            context: RecordContext {
                classifier_seed: cseed,
                ..base_context.clone()
            },
            out,
        };
        for &split in splits {
            let eval = if split == Split::Val { &ctx.val } else { &ctx.test };
            let pred = PredictionSet::new(clf.predict(eval.x.view()), eval.labels.clone(), eval.privileged.clone())?;
            for (name, v) in classification_scores(&pred).named() {
                rec.push(format!("{label}_{name}{suffix}"), Some(v), split);
            }
            match fairness_metrics(&pred) {
                Ok(f) => {
                    for (name, v) in f.named() {
                        rec.push(format!("{label}_{name}{suffix}"), Some(v), split);
                    }
                }
                Err(AuditError::DegenerateGroup(_)) => {
                    for name in ["EOD", "AOD", "EqOdds"] {
                        rec.push(format!("{label}_{name}{suffix}"), None, split);
                    }
                }
                Err(e) => return Err(e),
            }
            let clean = PredictionSet::new(
                clf.predict(eval.x_tokens.view()),
                eval.labels.clone(),
                eval.privileged.clone(),
            )?;
            let adv_tokens = attack_all(
                clf.as_ref(),
                eval.tokens.view(),
                &eval.labels,
                &ctx.featurizer,
                &ctx.token_embeddings,
                attack,
            );
            let adv_x = ctx.featurizer.featurize(adv_tokens.view());
            let adv = PredictionSet::new(clf.predict(adv_x.view()), eval.labels.clone(), eval.privileged.clone())?;
            let r = robustness_metrics(&clean, &adv)?;
            for (name, v) in r.adversarial.named() {
                rec.push(format!("{label}_adv_{name}{suffix}"), Some(v), split);
            }
            for (name, v) in r.delta.named() {
                rec.push(format!("{label}_delta_{name}{suffix}"), Some(v), split);
            }
        }
    }
    Ok(())
}

fn synthetic_data(
    config: &AuditConfig,
    item: &WorkItem<'_>,
    ctx: &FoldContext,
    item_seed: u64,
) -> Result<(TabularDataset, Option<PrecomputedEmbedding>)> {
    let origin = Origin::Synthetic {
        model_id: item.source.model_id.clone(),
        fold_id: item.fold,
        checkpoint_id: item.checkpoint,
    };
    match &item.input {
        SynthInput::Generate(spec, rows) => {
            let data = spec.generate(
                &ctx.reference.train,
                *rows,
                seed::derive(item_seed, &[seed::tag("generate")]),
            )?;
            Ok((data.with_origin(origin), None))
        }
        SynthInput::File(f) => {
            let data = TabularDataset::load_csv(&config.resolve(&f.path), ctx.reference.train.schema())?;
            let emb = f
                .embeddings
                .as_ref()
                .map(|p| PrecomputedEmbedding::load(&config.resolve(p)))
                .transpose()?;
            Ok((data.with_origin(origin), emb))
        }
    }
}

fn evaluate_item(
    config: &AuditConfig,
    item: &WorkItem<'_>,
    ctx: &FoldContext,
    task: &BinaryTask,
    splits: &[Split],
) -> Result<(Vec<MetricRecord>, Vec<WarningMessage>)> {
    let base = config.seeds.base;
    let item_seed = seed::derive(
        base,
        &[
            seed::tag("item"),
            seed::tag(&item.source.model_id),
            item.fold as u64,
            u64::from(item.checkpoint),
        ],
    );
    let (synth, precomputed) =
        synthetic_data(config, item, ctx, item_seed).map_err(|e| e.in_stage("synthetic data"))?;
    let mut warnings = Vec::new();
    if synth.dropped_rows() > 0 {
        warnings.push(
            WarningMessage::new(
                "dropped_rows",
                Severity::Info,
                format!(
                    "{} fold {} checkpoint {}: {} incomplete synthetic rows were dropped",
                    item.source.model_id,
                    item.fold,
                    item.checkpoint,
                    synth.dropped_rows()
                ),
            )
            .model(&item.source.model_id),
        );
    }
    let synth_tokens = ctx.reference.quantizer.quantize(&synth);
    let synth_phi = match &precomputed {
        Some(p) => p.embed(&synth)?,
        None => ctx.reference.embedder.embed(&synth)?,
    };
    let context = RecordContext {
        dataset_id: config.data.dataset_id.clone(),
        model_id: item.source.model_id.clone(),
        fold_id: item.fold,
        checkpoint_id: item.checkpoint,
        classifier_seed: None,
    };
    let mut records = Vec::new();
    let mut rec = Recorder {
        context: context.clone(),
        out: &mut records,
    };
    fidelity_and_privacy(
        &config.metrics,
        &ctx.reference,
        &synth,
        &synth_tokens,
        &synth_phi,
        item_seed,
        &mut rec,
    )
    .map_err(|e| e.in_stage("fidelity and privacy metrics"))?;
    // The attack seed depends only on the fold, so every model faces the
    // same perturbation draws.
    let attack = AttackConfig {
        seed: seed::derive(
            base,
            &[seed::tag("attack"), config.metrics.attack.seed, item.fold as u64],
        ),
        ..config.metrics.attack.clone()
    };
    downstream(config, ctx, task, &synth, splits, &attack, &mut records, &context)
        .map_err(|e| e.in_stage("downstream metrics"))?;
    Ok((records, warnings))
}

fn disclosures(config: &AuditConfig, precomputed: bool) -> Vec<Disclosure> {
    let m = &config.metrics;
    let d = |topic: &str, text: String| Disclosure {
        topic: topic.into(),
        text,
    };
    let classifiers: Vec<String> = m
        .classifiers
        .iter()
        .map(|c| match c {
            ClassifierSpec::LogisticRegression(s) => format!("LR (top {} ANOVA-F features)", s.max_features),
            ClassifierSpec::Knn { k } => format!("KNN (k = {k})"),
            ClassifierSpec::Mlp(_) => format!("MLP ({} seeds, early stopping on real validation F1)", m.mlp_seeds),
        })
        .collect();
    let private: Vec<String> = config
        .data
        .synthetic
        .iter()
        .filter_map(|s| match &s.generator {
            Some(GeneratorSpec::GaussianCopula {
                dp_epsilon: Some(eps), ..
            }) => Some(format!("{} (ε = {eps})", s.model_id)),
            _ => None,
        })
        .collect();
    let mut out = vec![
        d(
            "normalization",
            "Each metric is sign-aligned so that larger means lower risk, then mapped through one empirical CDF \
             pooled over every model, fold and checkpoint of the ranking pool."
                .into(),
        ),
        d(
            "aggregation",
            "Dimension indices are geometric means of the normalized metric scores (independent copula). \
             The trustworthiness index is the profile-weighted geometric mean of dimension indices."
                .into(),
        ),
        d(
            "uncertainty",
            format!(
                "Models are ranked by ln τ̄ − α ln Δ_τ with α = {}. τ̄ is the geometric mean of τ over folds \
                 and Δ_τ the mean squared deviation of τ around τ̄.",
                config.ranking.alpha
            ),
        ),
        d(
            "quantization",
            format!(
                "Continuous columns use {} equal-frequency bins fitted on each fold's real training split.",
                m.bins
            ),
        ),
        d(
            "embedding",
            if precomputed {
                "Fidelity and embedding-space privacy metrics use the supplied precomputed embeddings. \
                 Classifiers use standardized numeric columns plus one-hot categories."
                    .into()
            } else {
                "Rows are embedded as standardized numeric columns plus one-hot categories, excluding target \
                 and id columns."
                    .into()
            },
        ),
        d(
            "raw privacy distance",
            "Raw-space nearest-neighbour distances are Hamming distances between quantized token rows.".into(),
        ),
        d(
            "kernel",
            format!(
                "MMD uses {} random Fourier features with a median-heuristic bandwidth on pooled real and \
                 synthetic embeddings, and {} witness permutations.",
                m.rff_features, m.permutations
            ),
        ),
        d(
            "classifiers",
            format!("Downstream classifiers: {}.", classifiers.join(", ")),
        ),
        d(
            "robustness",
            format!(
                "Greedy token substitution on real evaluation rows with {} candidates per field and a budget of \
                 {} of the fields. Clean predictions use the same decoded-token view.",
                m.attack.candidates, m.attack.budget
            ),
        ),
        d(
            "missing values",
            "Fairness metrics of a protected group without positive or negative rows are reported as missing \
             and left out of aggregation."
                .into(),
        ),
        d(
            "checkpoints",
            "Models with several checkpoints are reduced per profile to the checkpoint with the best validation \
             score before ranking."
                .into(),
        ),
    ];
    if !private.is_empty() {
        out.push(d(
            "private sampling",
            format!(
                "Private samplers perturb token frequencies with Laplace noise of scale 2T/(ε·|V_L|), where T is \
                 the number of fields and |V_L| the field's vocabulary size. This scale is used as stated and has \
                 not been re-derived as a sensitivity bound. Affected models: {}.",
                private.join(", ")
            ),
        ));
    }
    out
}

fn audit(config: &AuditConfig, real: TabularDataset, real_label: &str) -> Result<AuditReport> {
    let base = config.seeds.base;
    let profiles = config.resolve_profiles()?;
    let task = BinaryTask::fit(&real).map_err(|e| e.in_stage("label encoding"))?;
    let precomputed = config
        .data
        .real_embeddings
        .as_ref()
        .map(|p| PrecomputedEmbedding::load(&config.resolve(p)))
        .transpose()
        .map_err(|e| e.in_stage("load embeddings"))?;
    let splits = split_folds(
        &real,
        config.folds.ratios,
        config.folds.num_folds,
        seed::derive(base, &[seed::tag("folds")]),
    )
    .map_err(|e| e.in_stage("fold split"))?;
    let folds: Vec<FoldContext> = splits
        .into_par_iter()
        .map(|split| {
            let k = split.fold_id;
            prepare_fold(config, &real, &task, split, precomputed.as_ref())
                .map_err(|e| e.in_stage(format!("prepare fold {k}")))
        })
        .collect::<Result<_>>()?;

    let validation = config
        .metrics
        .emit_validation
        .unwrap_or_else(|| config.has_multiple_checkpoints());
    let eval_splits: Vec<Split> = if validation {
        vec![Split::Val, Split::Test]
    } else {
        vec![Split::Test]
    };
    let items = work_items(config);
    let results: Vec<(Vec<MetricRecord>, Vec<WarningMessage>)> = items
        .par_iter()
        .map(|item| {
            evaluate_item(config, item, &folds[item.fold], &task, &eval_splits).map_err(|e| {
                e.in_stage(format!(
                    "model {} fold {} checkpoint {}",
                    item.source.model_id, item.fold, item.checkpoint
                ))
            })
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut item_warnings = Vec::new();
    for (r, w) in results {
        records.extend(r);
        item_warnings.extend(w);
    }
    let rankings = rank_models(&records, &profiles, config.ranking.alpha, None).map_err(|e| e.in_stage("ranking"))?;
    let summaries = summarize_models(&records, None).map_err(|e| e.in_stage("ranking"))?;

    let mut warnings = evaluate_warnings(&records, &summaries, &config.warnings);
    warnings.extend(item_warnings);
    for f in &folds {
        for w in &f.reference.quantizer.warnings {
            warnings.push(WarningMessage::new(
                "quantizer",
                Severity::Info,
                format!("fold {}: {w}", f.split.fold_id),
            ));
        }
    }
    if real.dropped_rows() > 0 {
        warnings.push(WarningMessage::new(
            "dropped_rows",
            Severity::Info,
            format!("{} incomplete real rows were dropped", real.dropped_rows()),
        ));
    }

    let mut models: BTreeMap<&str, (String, Vec<u32>)> = BTreeMap::new();
    for item in &items {
        let source = match &item.input {
            SynthInput::Generate(g, _) => g.label().to_string(),
            SynthInput::File(_) => "files".to_string(),
        };
        let e = models.entry(&item.source.model_id).or_insert((source, Vec::new()));
        if !e.1.contains(&item.checkpoint) {
            e.1.push(item.checkpoint);
        }
    }
    let schema = real.schema();
    let metadata = ReportMetadata {
        tool: "synthaudit".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        generated_at: None,
        config_digest: config.digest(),
        base_seed: base,
        dataset_id: config.data.dataset_id.clone(),
        real_data: RealDataSummary {
            path: real_label.into(),
            rows: real.n_rows(),
            dropped_rows: real.dropped_rows(),
            columns: schema.columns.clone(),
            target: schema.target.clone(),
            positive_value: task.positive_value.clone(),
            protected: schema.protected.column.clone(),
            privileged_value: task.privileged_value.clone(),
        },
        ratios: config.folds.ratios,
        folds: folds
            .iter()
            .map(|f| FoldSummary {
                fold_id: f.split.fold_id,
                seed: f.split.seed,
                train_rows: f.split.train.len(),
                val_rows: f.split.val.len(),
                test_rows: f.split.test.len(),
            })
            .collect(),
        models: models
            .into_iter()
            .map(|(id, (source, mut checkpoints))| {
                checkpoints.sort_unstable();
                ModelInfo {
                    model_id: id.into(),
                    source,
                    checkpoints,
                }
            })
            .collect(),
        alpha: config.ranking.alpha,
        validation_records: validation,
        config: serde_json::to_value(config).map_err(|source| AuditError::Json {
            context: "config echo".into(),
            source,
        })?,
    };
    Ok(AuditReport {
        format_version: REPORT_FORMAT_VERSION,
        metadata,
        profiles,
        rankings,
        dimension_tables: summaries,
        records,
        warnings,
        disclosures: disclosures(config, precomputed.is_some()),
    })
}

/// Fidelity and privacy indices of each named candidate against all of
/// `real` (no folds, no classifiers), with one ECDF pool over the
/// candidates. Summaries come back in candidate order.
pub fn fidelity_privacy_indices(
    real: &TabularDataset,
    candidates: &[(String, TabularDataset)],
    metrics: &MetricsConfig,
    seed: u64,
) -> Result<Vec<ModelSummary>> {
    let reference = Reference::fit(real.clone(), metrics.bins, None)?;
    let per_candidate: Vec<Vec<MetricRecord>> = candidates
        .par_iter()
        .map(|(id, synth)| {
            let mut out = Vec::new();
            let mut rec = Recorder {
                context: RecordContext {
                    dataset_id: "candidates".into(),
                    model_id: id.clone(),
                    fold_id: 0,
                    checkpoint_id: 0,
                    classifier_seed: None,
                },
                out: &mut out,
            };
            let tokens = reference.quantizer.quantize(synth);
            let phi = reference.embedder.embed(synth)?;
            let item_seed = seed::derive(seed, &[seed::tag("item"), seed::tag(id)]);
            fidelity_and_privacy(metrics, &reference, synth, &tokens, &phi, item_seed, &mut rec)
                .map_err(|e| e.in_stage(format!("candidate {id}")))?;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let records: Vec<MetricRecord> = per_candidate.into_iter().flatten().collect();
    let summaries = summarize_models(&records, None)?;
    candidates
        .iter()
        .map(|(id, _)| {
            summaries
                .iter()
                .find(|s| &s.model_id == id)
                .cloned()
                .ok_or_else(|| AuditError::invalid(format!("duplicate candidate id {id}")))
        })
        .collect()
}
