use std::collections::HashSet;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::corpus::{
    assemble_table, read_corpus, read_embedding_rows, resolve_splits, ContextSource, Corpus,
    EmbeddingRows, ResolvedSplits, SplitManifest, SplitSet,
};
use crate::error::{Error, Result};
use crate::harness::data::Encoder;
use crate::harness::early_stop::TrainRecord;
use crate::harness::evaluate::{evaluate, Evaluation};
use crate::harness::stats::RunStatistics;
use crate::harness::train::train;
use crate::model::ModelConfig;
use crate::textprep::{EncodedSegment, PreprocessingFlags};

/// Seeds used when a spec lists none.
pub const DEFAULT_SEEDS: [u64; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

/// One named configuration to run over several seeds. `config.seed` and
/// `config.label_count` are overwritten per run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub config: ModelConfig,
    pub flags: PreprocessingFlags,
    pub context_source: ContextSource,
    pub corpus: PathBuf,
    pub manifest: PathBuf,
    pub seeds: Vec<u64>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::Config("experiment name must not be empty".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config(format!("experiment {}: no seeds", self.name)));
        }
        if let Some(w) = &self.config.word_branch {
            if w.embedding_mode.is_pretrained() && w.embedding_file.is_none() {
                return Err(Error::Config(format!(
                    "experiment {}: pre-trained word embeddings need embedding_file",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Rejects batches with duplicate experiment names.
pub fn check_unique_names(specs: &[ExperimentSpec]) -> Result<()> {
    let mut seen = HashSet::new();
    for s in specs {
        if !seen.insert(s.name.as_str()) {
            return Err(Error::Config(format!(
                "duplicate experiment name {:?}",
                s.name
            )));
        }
    }
    Ok(())
}

/// One seed's results, pooled over folds.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub seed: u64,
    pub validation: Evaluation,
    pub test: Evaluation,
    /// One record per fold.
    pub records: Vec<TrainRecord>,
    pub aborted: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub name: String,
    pub runs: Vec<RunOutcome>,
    pub validation: RunStatistics,
    pub test: RunStatistics,
    pub notes: Vec<String>,
}

/// Loads the spec's corpus and manifest and runs it.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let corpus = read_corpus(&spec.corpus)?;
    let manifest = SplitManifest::read(&spec.manifest)?;
    let splits = resolve_splits(&corpus.segments, &manifest)?;
    run_on_splits(spec, &corpus, &splits)
}

/// Reads the configured word vectors for `encoder`'s word vocabulary, if the
/// word branch is pre-trained.
pub fn load_pretrained_rows(
    config: &ModelConfig,
    encoder: &Encoder,
) -> Result<Option<EmbeddingRows>> {
    let Some(w) = config
        .word_branch
        .as_ref()
        .filter(|w| w.embedding_mode.is_pretrained())
    else {
        return Ok(None);
    };
    let path = w
        .embedding_file
        .as_ref()
        .ok_or_else(|| Error::Config("pre-trained word embeddings need embedding_file".into()))?;
    let rows = read_embedding_rows(path, &encoder.word_vocab)?;
    if rows.dim != w.embedding_dim {
        return Err(Error::Embedding(format!(
            "{}: vectors have dimension {}, config expects {}",
            path.display(),
            rows.dim,
            w.embedding_dim
        )));
    }
    Ok(Some(rows))
}

struct PreparedFold {
    encoder: Encoder,
    train: Vec<EncodedSegment>,
    validation: Vec<EncodedSegment>,
    test: Vec<EncodedSegment>,
    embeddings: Option<EmbeddingRows>,
}

fn prepare_fold(
    spec: &ExperimentSpec,
    config: &ModelConfig,
    corpus: &Corpus,
    set: &SplitSet,
    notes: &mut Vec<String>,
) -> Result<PreparedFold> {
    let encoder = Encoder::fit(&set.train, corpus.labels.clone(), spec.flags, config)?;
    let (train, a) = encoder.encode_all(&set.train)?;
    let (validation, b) = encoder.encode_all(&set.validation)?;
    let (test, c) = encoder.encode_all(&set.test)?;
    if a + b + c > 0 {
        notes.push(format!(
            "{}: {}: skipped {a}/{b}/{c} train/validation/test segments with no tokens",
            spec.name, set.name
        ));
    }
    let embeddings = load_pretrained_rows(config, &encoder)?;
    if let Some(rows) = &embeddings {
        notes.push(format!(
            "{}: {}: {:.1}% of word types have no pre-trained vector",
            spec.name,
            set.name,
            100.0 * rows.coverage.missing_fraction()
        ));
    }
    Ok(PreparedFold {
        encoder,
        train,
        validation,
        test,
        embeddings,
    })
}

fn run_seed(
    spec: &ExperimentSpec,
    config: &ModelConfig,
    folds: &[PreparedFold],
    seed: u64,
) -> Result<RunOutcome> {
    let config = ModelConfig {
        seed,
        ..config.clone()
    };
    let classes = config.label_count;
    let mut outcome = RunOutcome {
        seed,
        validation: Evaluation::new(classes),
        test: Evaluation::new(classes),
        records: Vec::with_capacity(folds.len()),
        aborted: None,
    };
    for fold in folds {
        let table = fold
            .embeddings
            .as_ref()
            .map(|rows| assemble_table(fold.encoder.word_vocab.len(), rows, seed));
        let (model, record) = train(&config, &fold.encoder, &fold.train, &fold.validation, table)?;
        if let Some(reason) = &record.aborted {
            outcome.aborted = Some(reason.clone());
            outcome.records.push(record);
            break;
        }
        outcome
            .validation
            .merge(&evaluate(&model, &fold.validation, spec.context_source)?);
        outcome
            .test
            .merge(&evaluate(&model, &fold.test, spec.context_source)?);
        outcome.records.push(record);
    }
    Ok(outcome)
}

/// Runs every seed (in parallel) on already-loaded data. Each seed trains a
/// fresh model per fold; its accuracy is pooled over folds. Aborted runs are
/// excluded from the statistics and noted.
pub fn run_on_splits(
    spec: &ExperimentSpec,
    corpus: &Corpus,
    splits: &ResolvedSplits,
) -> Result<ExperimentResult> {
    spec.validate()?;
    let config = ModelConfig {
        label_count: corpus.labels.len(),
        ..spec.config.clone()
    };
    config.validate()?;
    let mut notes = Vec::new();
    let folds = splits
        .sets()
        .iter()
        .map(|set| prepare_fold(spec, &config, corpus, set, &mut notes))
        .collect::<Result<Vec<_>>>()?;
    let runs = spec
        .seeds
        .par_iter()
        .map(|&seed| run_seed(spec, &config, &folds, seed))
        .collect::<Result<Vec<_>>>()?;

    let mut validation = Vec::new();
    let mut test = Vec::new();
    for run in &runs {
        match &run.aborted {
            Some(reason) => notes.push(format!(
                "{}: seed {} excluded: {reason}",
                spec.name, run.seed
            )),
            None => {
                validation.push(run.validation.accuracy());
                test.push(run.test.accuracy());
            }
        }
    }
    let excluded = runs.len() - test.len();
    Ok(ExperimentResult {
        name: spec.name.clone(),
        validation: RunStatistics::from_accuracies(validation, excluded),
        test: RunStatistics::from_accuracies(test, excluded),
        runs,
        notes,
    })
}
