//! TOML model configs and experiment specs. Every key is optional and
//! falls back to the library default; unknown keys are errors.
//!
//! ```toml
//! use_context = true
//! n_prev = 3
//! reduction_dim = 100
//! seed = 1
//! dropout = 0.0
//!
//! [char]
//! window_sizes = [3, 5, 7]
//! filters_per_window = 100
//! embedding_dim = 30
//!
//! [word]
//! window_sizes = [1, 2, 3]
//! embedding_mode = "pretrained_fixed"
//! embedding_file = "vectors.txt"
//!
//! [training]
//! batch_size = 64
//! max_epochs = 100
//! patience = 10
//!
//! [training.optimizer]
//! rule = "adam"
//! learning_rate = 0.001
//!
//! [preprocessing]
//! keep_capitalization = false
//! keep_punctuation = true
//! use_lemmatized_text = false
//! ```
//!
//! Omitting both `[char]` and `[word]` gives the default character model.
//! An experiment spec holds `[[experiment]]` tables with `name`, `corpus`,
//! `manifest`, optional `context_source` and `seeds`, and an optional
//! `[experiment.config]` table in the format above. Relative paths resolve
//! against the directory of the file that names them.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::corpus::ContextSource;
use crate::error::{Error, Result};
use crate::harness::experiment::{check_unique_names, ExperimentSpec, DEFAULT_SEEDS};
use crate::model::{BranchConfig, EmbeddingMode, ModelConfig, TrainingConfig};
use crate::nn::optim::OptimizerConfig;
use crate::textprep::{PreprocessingFlags, TokenKind};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchSection {
    window_sizes: Option<Vec<usize>>,
    filters_per_window: Option<usize>,
    embedding_dim: Option<usize>,
    embedding_mode: Option<EmbeddingMode>,
    embedding_file: Option<PathBuf>,
    min_count: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainingSection {
    batch_size: Option<usize>,
    max_epochs: Option<usize>,
    patience: Option<usize>,
    optimizer: Option<OptimizerConfig>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigSection {
    #[serde(rename = "char")]
    char_branch: Option<BranchSection>,
    #[serde(rename = "word")]
    word_branch: Option<BranchSection>,
    use_context: Option<bool>,
    n_prev: Option<usize>,
    reduction_dim: Option<usize>,
    seed: Option<u64>,
    dropout: Option<f64>,
    training: Option<TrainingSection>,
    preprocessing: Option<PreprocessingFlags>,
}

/// A model configuration plus the preprocessing it trains under.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub flags: PreprocessingFlags,
}

fn branch(section: BranchSection, kind: TokenKind, base_dir: &Path) -> BranchConfig {
    let d = BranchConfig::default_for(kind);
    BranchConfig {
        window_sizes: section.window_sizes.unwrap_or(d.window_sizes),
        filters_per_window: section.filters_per_window.unwrap_or(d.filters_per_window),
        embedding_dim: section.embedding_dim.unwrap_or(d.embedding_dim),
        embedding_mode: section.embedding_mode.unwrap_or(d.embedding_mode),
        embedding_file: section.embedding_file.map(|p| base_dir.join(p)),
        min_count: section.min_count.unwrap_or(d.min_count),
    }
}

impl ConfigSection {
    fn resolve(self, base_dir: &Path) -> RunConfig {
        let d = ModelConfig::default();
        let (char_branch, word_branch) = match (self.char_branch, self.word_branch) {
            (None, None) => (d.char_branch.clone(), None),
            (c, w) => (
                c.map(|s| branch(s, TokenKind::Character, base_dir)),
                w.map(|s| branch(s, TokenKind::Word, base_dir)),
            ),
        };
        let t = self.training.unwrap_or_default();
        let td = TrainingConfig::default();
        RunConfig {
            model: ModelConfig {
                char_branch,
                word_branch,
                use_context: self.use_context.unwrap_or(d.use_context),
                n_prev: self.n_prev.unwrap_or(d.n_prev),
                reduction_dim: self.reduction_dim.unwrap_or(d.reduction_dim),
                label_count: d.label_count,
                seed: self.seed.unwrap_or(d.seed),
                dropout: self.dropout.unwrap_or(d.dropout),
                training: TrainingConfig {
                    optimizer: t.optimizer.unwrap_or(td.optimizer),
                    batch_size: t.batch_size.unwrap_or(td.batch_size),
                    max_epochs: t.max_epochs.unwrap_or(td.max_epochs),
                    patience: t.patience.unwrap_or(td.patience),
                },
            },
            flags: self.preprocessing.unwrap_or_default(),
        }
    }
}

/// Parses a model config; relative embedding paths resolve against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig> {
    let section: ConfigSection = toml::from_str(text)?;
    Ok(section.resolve(base_dir))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parent(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new(""))
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&read(path)?, parent(path)).map_err(|e| in_file(path, e))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentEntry {
    name: String,
    corpus: PathBuf,
    manifest: PathBuf,
    context_source: Option<ContextSource>,
    seeds: Option<Vec<u64>>,
    config: Option<ConfigSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    experiment: Vec<ExperimentEntry>,
}

/// Parses an experiment spec; relative paths resolve against `base_dir`.
pub fn parse_experiments(text: &str, base_dir: &Path) -> Result<Vec<ExperimentSpec>> {
    let file: SpecFile = toml::from_str(text)?;
    if file.experiment.is_empty() {
        return Err(Error::Config("spec defines no experiments".into()));
    }
    let specs: Vec<ExperimentSpec> = file
        .experiment
        .into_iter()
        .map(|e| {
            let run = e.config.unwrap_or_default().resolve(base_dir);
            ExperimentSpec {
                name: e.name,
                config: run.model,
                flags: run.flags,
                context_source: e.context_source.unwrap_or_default(),
                corpus: base_dir.join(e.corpus),
                manifest: base_dir.join(e.manifest),
                seeds: e.seeds.unwrap_or_else(|| DEFAULT_SEEDS.to_vec()),
            }
        })
        .collect();
    check_unique_names(&specs)?;
    for s in &specs {
        s.validate()?;
    }
    Ok(specs)
}

pub fn load_experiments(path: &Path) -> Result<Vec<ExperimentSpec>> {
    parse_experiments(&read(path)?, parent(path)).map_err(|e| in_file(path, e))
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Toml(t) => Error::Config(format!("{}: {}", path.display(), t.message())),
        other => other,
    }
}
