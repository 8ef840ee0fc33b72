//! `synthaudit` command line: full audits, ranking and checkpoint selection
//! from metric records, and the baseline generators.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use synthaudit::aggregation::{
    load_profiles, preset_profiles, rank_models, read_records, select_checkpoint_from_records, write_records,
    TrustDimension, TrustProfile,
};
use synthaudit::report::{fidelity_privacy_indices, render_json, render_markdown, MetricsConfig};
use synthaudit::synthgen::{iterative_retrain, GeneratorSpec};
use synthaudit::{run_audit, AuditConfig, AuditError, DatasetSchema, TabularDataset};

#[derive(Parser)]
#[command(
    name = "synthaudit",
    version,
    about = "Trustworthiness audits of synthetic tabular data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full audit and write report.json, report.md and records.jsonl
    Audit {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing)
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank models from metric records under one or more profiles
    Rank {
        /// JSON-lines metric records
        #[arg(long)]
        records: PathBuf,
        /// Profile file (`name → weights`); omit for the presets
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
    },
    /// Pick each model's best checkpoint on validation records
    Select {
        #[arg(long)]
        records: PathBuf,
        /// Profile name, looked up in --profiles or the presets
        #[arg(long)]
        profile: String,
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
    },
    /// Fit a Gaussian copula on real data and write synthetic rows as CSV
    Generate {
        #[arg(long)]
        real: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        seed: u64,
        /// Sample through the private token sampler with this ε
        #[arg(long)]
        dp_epsilon: Option<f64>,
        /// Output CSV; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Retrain a Gaussian copula on its own samples and track fidelity and
    /// privacy against the real data
    Collapse {
        #[arg(long)]
        real: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        generations: usize,
        /// Rows per generation (default: as many as the real data)
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for one CSV per generation
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_real(real: &Path, schema: &Path) -> synthaudit::Result<TabularDataset> {
    let schema = DatasetSchema::load(schema)?;
    TabularDataset::load_csv(real, &schema)
}

fn read_record_file(path: &Path) -> synthaudit::Result<Vec<synthaudit::MetricRecord>> {
    let file = File::open(path).map_err(|source| AuditError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_records(BufReader::new(file))
}

fn profiles_from(path: Option<&Path>) -> synthaudit::Result<Vec<TrustProfile>> {
    match path {
        Some(p) => load_profiles(p),
        None => Ok(preset_profiles()),
    }
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn now_rfc3339() -> String {
    time::OffsetDateTime::now_utc()
        .format(&time::format_description::well_known::Rfc3339)
        .unwrap_or_default()
}

fn audit(config: &Path, out: &Path) -> anyhow::Result<()> {
    let cfg = AuditConfig::load(config)?;
    let mut report = run_audit(&cfg)?;
    report.metadata.generated_at = Some(now_rfc3339());
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    write_file(&out.join("report.json"), &render_json(&report)?)?;
    write_file(&out.join("report.md"), &render_markdown(&report))?;
    let records = out.join("records.jsonl");
    let file = File::create(&records).with_context(|| format!("cannot write {}", records.display()))?;
    let mut w = BufWriter::new(file);
    write_records(&mut w, &report.records)?;
    w.flush()?;

    for ranking in &report.rankings {
        let top = ranking.entries.first().map_or("-", |e| e.summary.model_id.as_str());
        println!("{:<12} top: {top}", ranking.profile.name);
    }
    for w in &report.warnings {
        eprintln!("[{}] {}", w.severity.label(), w.text);
    }
    println!("report written to {}", out.display());
    Ok(())
}

fn rank(records: &Path, profiles: Option<&Path>, alpha: f64) -> anyhow::Result<()> {
    let records = read_record_file(records)?;
    let profiles = profiles_from(profiles)?;
    let rankings = rank_models(&records, &profiles, alpha, None)?;
    let mut out = io::stdout().lock();
    for ranking in rankings {
        writeln!(out, "# {} {}", ranking.profile.name, ranking.profile.notation())?;
        writeln!(out, "rank\tdataset\tmodel\tcheckpoint\ttau_mean\ttau_dev\tscore")?;
        for e in &ranking.entries {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}",
                e.rank,
                e.summary.dataset_id,
                e.summary.model_id,
                e.summary.checkpoint_id,
                e.tau_mean,
                e.tau_deviation,
                e.score
            )?;
        }
    }
    Ok(())
}

fn select(records: &Path, profile: &str, profiles: Option<&Path>, alpha: f64) -> anyhow::Result<()> {
    let records = read_record_file(records)?;
    let profiles = profiles_from(profiles)?;
    let Some(profile) = profiles.iter().find(|p| p.name == profile) else {
        return Err(AuditError::InvalidArgument(format!("unknown profile {profile}")).into());
    };
    let mut models: Vec<(&str, &str)> = records
        .iter()
        .map(|r| (r.context.dataset_id.as_str(), r.context.model_id.as_str()))
        .collect();
    models.sort_unstable();
    models.dedup();
    let mut out = io::stdout().lock();
    writeln!(out, "dataset\tmodel\tselected\tscores")?;
    for (dataset, model) in models {
        let own: Vec<_> = records
            .iter()
            .filter(|r| r.context.dataset_id == dataset)
            .cloned()
            .collect();
        let sel = select_checkpoint_from_records(&own, model, profile, alpha, None)
            .with_context(|| format!("selecting a checkpoint for {model}"))?;
        let scores: Vec<String> = sel.scores.iter().map(|(c, s)| format!("{c}:{s:.4}")).collect();
        writeln!(out, "{dataset}\t{model}\t{}\t{}", sel.checkpoint_id, scores.join(" "))?;
    }
    Ok(())
}

fn generate(
    real: &Path,
    schema: &Path,
    rows: usize,
    seed: u64,
    dp_epsilon: Option<f64>,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let real = load_real(real, schema)?;
    let spec = GeneratorSpec::GaussianCopula { dp_epsilon, bins: 10 };
    let synth = spec.generate(&real, Some(rows), seed)?;
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            synth.write_csv(BufWriter::new(file))?;
        }
        None => synth.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn collapse(
    real: &Path,
    schema: &Path,
    generations: usize,
    rows: Option<usize>,
    seed: u64,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let real = load_real(real, schema)?;
    let rows = rows.unwrap_or(real.n_rows());
    let run = iterative_retrain(&real, generations, rows, seed)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for (g, data) in run.generations.iter().enumerate() {
            let path = dir.join(format!("generation_{}.csv", g + 1));
            let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
            data.write_csv(BufWriter::new(file))?;
        }
    }
    let candidates: Vec<(String, TabularDataset)> = run
        .generations
        .into_iter()
        .enumerate()
        .map(|(g, d)| (format!("generation_{}", g + 1), d))
        .collect();
    let summaries = fidelity_privacy_indices(&real, &candidates, &MetricsConfig::default(), seed)?;
    println!("generation\tfidelity\tprivacy");
    for (g, s) in summaries.iter().enumerate() {
        let idx = |d| s.dimension(d).map_or(f64::NAN, |x| x.mean);
        println!(
            "{}\t{:.4}\t{:.4}",
            g + 1,
            idx(TrustDimension::Fidelity),
            idx(TrustDimension::Privacy)
        );
    }
    if let Some(g) = run.collapsed_at {
        println!("every column became constant at generation {g}; the chain stopped there");
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Audit { config, out } => audit(&config, &out),
        Command::Rank {
            records,
            profiles,
            alpha,
        } => rank(&records, profiles.as_deref(), alpha),
        Command::Select {
            records,
            profile,
            profiles,
            alpha,
        } => select(&records, &profile, profiles.as_deref(), alpha),
        Command::Generate {
            real,
            schema,
            rows,
            seed,
            dp_epsilon,
            out,
        } => generate(&real, &schema, rows, seed, dp_epsilon, out.as_deref()),
        Command::Collapse {
            real,
            schema,
            generations,
            rows,
            seed,
            out,
        } => {
            if generations == 0 {
                bail!(AuditError::InvalidArgument("--generations must be at least 1".into()));
            }
            collapse(&real, &schema, generations, rows, seed, out.as_deref())
        }
    }
}

/// 1 for input problems (files, schema, config values), 2 for failures
/// during computation.
fn exit_code(err: &anyhow::Error) -> u8 {
    let config = err.chain().any(|cause| {
        cause
            .downcast_ref::<AuditError>()
            .is_some_and(AuditError::is_config_error)
            || cause.downcast_ref::<io::Error>().is_some()
    });
    if config {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
