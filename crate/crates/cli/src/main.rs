use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dialact_core::corpus::{
    read_corpus, resolve_splits, ContextSource, Corpus, ResolvedSplits, SplitManifest, SplitSet,
};
use dialact_core::harness::{
    self, check_unique_names, emit_report, evaluate, load_config, load_experiments,
    load_pretrained_rows, report_rows, run_experiment, run_grid, Encoder, GridOptions,
    ReportFormat, RunConfig,
};
use dialact_core::model::{ModelBundle, ModelConfig};
use dialact_core::nn::gradcheck::DEFAULT_STEP;
use dialact_core::{corpus, Error, Result};

#[derive(Parser)]
#[command(
    name = "dialact",
    version,
    about = "Dialog act classification with character- and word-level CNNs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Split {
    Train,
    Validation,
    Test,
}

#[derive(Clone, Copy, ValueEnum)]
enum Context {
    Gold,
    Predicted,
}

impl From<Context> for ContextSource {
    fn from(c: Context) -> Self {
        match c {
            Context::Gold => ContextSource::Gold,
            Context::Predicted => ContextSource::Predicted,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => ReportFormat::Text,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train one model and write a checkpoint.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Model config (TOML); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_checkpoint: PathBuf,
        /// Fold to use with a k-fold manifest (1-based).
        #[arg(long, default_value_t = 1)]
        fold: usize,
    },
    /// Score a checkpoint on one split.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum, default_value_t = Split::Test)]
        split: Split,
        #[arg(long, value_enum, default_value_t = Context::Gold)]
        context_source: Context,
        #[arg(long, default_value_t = 1)]
        fold: usize,
        /// Also print the confusion matrix.
        #[arg(long)]
        confusion: bool,
    },
    /// Run the experiments of a spec file and write a report.
    Experiment {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated seeds overriding every experiment's list.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the full ablation grid on one corpus.
    Grid {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Word vectors for the pre-trained rows.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// Base config supplying dimensions and training settings.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Finite-difference check of a configured model on a toy batch.
    Gradcheck {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        /// Elements checked per parameter (evenly spaced); 0 checks all.
        #[arg(long, default_value_t = 200)]
        max_elements: usize,
    },
}

fn run_config(path: Option<&Path>) -> Result<RunConfig> {
    path.map_or_else(|| Ok(RunConfig::default()), load_config)
}

fn load_splits(corpus: &Path, manifest: &Path) -> Result<(Corpus, ResolvedSplits)> {
    let corpus = read_corpus(corpus)?;
    let splits = resolve_splits(&corpus.segments, &SplitManifest::read(manifest)?)?;
    Ok((corpus, splits))
}

fn pick_fold(splits: &ResolvedSplits, fold: usize) -> Result<&SplitSet> {
    let sets = splits.sets();
    if fold == 0 || fold > sets.len() {
        return Err(Error::Config(format!(
            "fold {fold} out of range 1..={}",
            sets.len()
        )));
    }
    Ok(&sets[fold - 1])
}

fn train(
    corpus: &Path,
    manifest: &Path,
    config: Option<&Path>,
    out: &Path,
    fold: usize,
) -> Result<()> {
    let RunConfig {
        model: config,
        flags,
    } = run_config(config)?;
    let (corpus, splits) = load_splits(corpus, manifest)?;
    let set = pick_fold(&splits, fold)?;
    let config = ModelConfig {
        label_count: corpus.labels.len(),
        ..config
    };
    config.validate()?;
    let encoder = Encoder::fit(&set.train, corpus.labels.clone(), flags, &config)?;
    let (train, skipped_train) = encoder.encode_all(&set.train)?;
    let (validation, skipped_validation) = encoder.encode_all(&set.validation)?;
    let table = load_pretrained_rows(&config, &encoder)?
        .map(|rows| corpus::assemble_table(encoder.word_vocab.len(), &rows, config.seed));
    let (model, record) = harness::train(&config, &encoder, &train, &validation, table)?;
    if let Some(reason) = record.aborted {
        return Err(Error::NonFinite(reason));
    }
    let best = record.validation_accuracy[record.best_epoch - 1];
    harness::bundle(model, encoder).save(out)?;
    println!(
        "trained split={} train={} validation={} skipped={} best_epoch={} stop_epoch={} validation_accuracy={:.4} checkpoint={}",
        set.name,
        train.len(),
        validation.len(),
        skipped_train + skipped_validation,
        record.best_epoch,
        record.stop_epoch,
        best,
        out.display()
    );
    Ok(())
}

fn eval(
    checkpoint: &Path,
    corpus: &Path,
    manifest: &Path,
    split: Split,
    source: Context,
    fold: usize,
    confusion: bool,
) -> Result<()> {
    let bundle = ModelBundle::load(checkpoint)?;
    let (corpus, splits) = load_splits(corpus, manifest)?;
    if corpus.labels != bundle.labels {
        return Err(Error::Corpus(
            "corpus label set differs from the checkpoint's".into(),
        ));
    }
    let set = pick_fold(&splits, fold)?;
    let segments = match split {
        Split::Train => &set.train,
        Split::Validation => &set.validation,
        Split::Test => &set.test,
    };
    let encoder = Encoder {
        char_vocab: bundle.char_vocab.clone(),
        word_vocab: bundle.word_vocab.clone(),
        labels: bundle.labels.clone(),
        flags: bundle.flags,
        pad: bundle.pad,
    };
    let (encoded, skipped) = encoder.encode_all(segments)?;
    let result = evaluate(&bundle.model, &encoded, source.into())?;
    println!(
        "accuracy={:.4} correct={} total={} skipped={}",
        result.accuracy(),
        result.correct,
        result.total,
        skipped
    );
    if confusion {
        for (label, row) in bundle.labels.labels().iter().zip(&result.confusion) {
            let cells: Vec<String> = row.iter().map(usize::to_string).collect();
            println!("{label}\t{}", cells.join("\t"));
        }
    }
    Ok(())
}

fn experiment(spec: &Path, seeds: Option<Vec<u64>>, report: &Path, format: Format) -> Result<()> {
    let mut specs = load_experiments(spec)?;
    if let Some(seeds) = seeds {
        if seeds.is_empty() {
            return Err(Error::Config("--seeds is empty".into()));
        }
        for s in &mut specs {
            s.seeds = seeds.clone();
        }
    }
    check_unique_names(&specs)?;
    let mut results = Vec::with_capacity(specs.len());
    for s in &specs {
        log::info!("running {} over {} seeds", s.name, s.seeds.len());
        results.push(run_experiment(s)?);
    }
    let notes: Vec<String> = results
        .iter()
        .flat_map(|r| r.notes.iter().cloned())
        .collect();
    let rows = report_rows(&results);
    emit_report(report, &rows, &notes, format.into())?;
    println!(
        "experiments={} rows={} report={}",
        results.len(),
        rows.len(),
        report.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn grid(
    corpus: PathBuf,
    manifest: PathBuf,
    report: &Path,
    embeddings: Option<PathBuf>,
    config: Option<&Path>,
    seeds: Option<Vec<u64>>,
    format: Format,
) -> Result<()> {
    let base = run_config(config)?;
    let opts = GridOptions {
        corpus,
        manifest,
        embeddings,
        seeds: seeds.unwrap_or_else(|| harness::DEFAULT_SEEDS.to_vec()),
        base: base.model,
    };
    let (results, notes) = run_grid(&opts)?;
    for n in &notes {
        log::warn!("{n}");
    }
    let rows = report_rows(&results);
    emit_report(report, &rows, &notes, format.into())?;
    println!(
        "experiments={} rows={} report={}",
        results.len(),
        rows.len(),
        report.display()
    );
    Ok(())
}

fn gradcheck(config: Option<&Path>, tolerance: f64, step: f64, max_elements: usize) -> Result<()> {
    let config = run_config(config)?.model;
    let limit = (max_elements > 0).then_some(max_elements);
    let report = harness::check_config(&config, step, tolerance, limit)?;
    for p in &report.parameters {
        println!(
            "{}\tchecked={}\tmax_relative_error={:.3e}{}",
            p.name,
            p.elements_checked,
            p.max_relative_error,
            if p.trainable { "" } else { "\tfrozen" }
        );
    }
    let worst = report.max_relative_error();
    if !report.passed() {
        return Err(Error::GradCheck(format!(
            "max relative error {worst:.3e} >= tolerance {tolerance:e}"
        )));
    }
    println!("gradcheck passed max_relative_error={worst:.3e} tolerance={tolerance:e}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            corpus,
            manifest,
            config,
            out_checkpoint,
            fold,
        } => train(&corpus, &manifest, config.as_deref(), &out_checkpoint, fold),
        Command::Eval {
            checkpoint,
            corpus,
            manifest,
            split,
            context_source,
            fold,
            confusion,
        } => eval(
            &checkpoint,
            &corpus,
            &manifest,
            split,
            context_source,
            fold,
            confusion,
        ),
        Command::Experiment {
            spec,
            seeds,
            report,
            format,
        } => experiment(&spec, seeds, &report, format),
        Command::Grid {
            corpus,
            manifest,
            report,
            embeddings,
            config,
            seeds,
            format,
        } => grid(
            corpus,
            manifest,
            &report,
            embeddings,
            config.as_deref(),
            seeds,
            format,
        ),
        Command::Gradcheck {
            config,
            tolerance,
            step,
            max_elements,
        } => gradcheck(config.as_deref(), tolerance, step, max_elements),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.message().replace(['\n', '\r'], " ");
            eprintln!("error: {}: {msg}", e.kind());
            ExitCode::FAILURE
        }
    }
}
