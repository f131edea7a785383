use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::corpus::context_dim;
use crate::error::{Error, Result};
use crate::nn::optim::OptimizerConfig;
use crate::textprep::TokenKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingMode {
    RandomTrainable,
    PretrainedFixed,
    PretrainedTrainable,
}

impl EmbeddingMode {
    pub fn is_pretrained(self) -> bool {
        !matches!(self, EmbeddingMode::RandomTrainable)
    }

    pub fn is_trainable(self) -> bool {
        !matches!(self, EmbeddingMode::PretrainedFixed)
    }
}

/// One tokenisation branch: embedding plus parallel convolutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchConfig {
    pub window_sizes: Vec<usize>,
    pub filters_per_window: usize,
    pub embedding_dim: usize,
    pub embedding_mode: EmbeddingMode,
    #[serde(default)]
    pub embedding_file: Option<PathBuf>,
    pub min_count: usize,
}

impl BranchConfig {
    pub fn character(window_sizes: &[usize]) -> Self {
        BranchConfig {
            window_sizes: window_sizes.to_vec(),
            filters_per_window: 100,
            embedding_dim: 30,
            embedding_mode: EmbeddingMode::RandomTrainable,
            embedding_file: None,
            min_count: 1,
        }
    }

    pub fn word(window_sizes: &[usize]) -> Self {
        BranchConfig {
            window_sizes: window_sizes.to_vec(),
            filters_per_window: 100,
            embedding_dim: 200,
            embedding_mode: EmbeddingMode::PretrainedFixed,
            embedding_file: None,
            min_count: 2,
        }
    }

    pub fn default_for(kind: TokenKind) -> Self {
        match kind {
            TokenKind::Character => Self::character(&[3, 5, 7]),
            TokenKind::Word => Self::word(&[1, 2, 3]),
        }
    }

    pub fn max_window(&self) -> usize {
        self.window_sizes.iter().copied().max().unwrap_or(1)
    }

    pub fn pooled_dim(&self) -> usize {
        self.window_sizes.len() * self.filters_per_window
    }

    pub fn validate(&self, kind: TokenKind) -> Result<()> {
        let name = kind.name();
        if self.window_sizes.is_empty() {
            return Err(Error::Config(format!(
                "{name} branch: window_sizes is empty"
            )));
        }
        if self.window_sizes.contains(&0) {
            return Err(Error::Config(format!(
                "{name} branch: window sizes must be positive"
            )));
        }
        if self.window_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "{name} branch: window_sizes {:?} must be strictly increasing",
                self.window_sizes
            )));
        }
        if self.filters_per_window == 0 || self.embedding_dim == 0 {
            return Err(Error::Config(format!(
                "{name} branch: filters_per_window and embedding_dim must be positive"
            )));
        }
        if kind == TokenKind::Character && self.embedding_mode.is_pretrained() {
            return Err(Error::Config(
                "char branch: pre-trained embeddings are only supported for words".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingConfig {
    pub optimizer: OptimizerConfig,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without strict validation improvement before stopping.
    pub patience: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            optimizer: OptimizerConfig::default(),
            batch_size: 64,
            max_epochs: 100,
            patience: 10,
        }
    }
}

/// Architecture and training hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub char_branch: Option<BranchConfig>,
    pub word_branch: Option<BranchConfig>,
    pub use_context: bool,
    /// Preceding segments whose labels enter the context vector.
    pub n_prev: usize,
    pub reduction_dim: usize,
    /// Number of classes; filled in from the corpus label set.
    pub label_count: usize,
    pub seed: u64,
    /// Dropout on the pooled segment representation during training.
    pub dropout: f64,
    pub training: TrainingConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            char_branch: Some(BranchConfig::character(&[3, 5, 7])),
            word_branch: None,
            use_context: false,
            n_prev: 3,
            reduction_dim: 100,
            label_count: 0,
            seed: 0,
            dropout: 0.0,
            training: TrainingConfig::default(),
        }
    }
}

impl ModelConfig {
    pub fn char_only(window_sizes: &[usize]) -> Self {
        ModelConfig {
            char_branch: Some(BranchConfig::character(window_sizes)),
            ..Default::default()
        }
    }

    pub fn word_only(window_sizes: &[usize]) -> Self {
        ModelConfig {
            char_branch: None,
            word_branch: Some(BranchConfig::word(window_sizes)),
            ..Default::default()
        }
    }

    /// Enabled branches, character first.
    pub fn branches(&self) -> impl Iterator<Item = (TokenKind, &BranchConfig)> {
        self.char_branch
            .iter()
            .map(|b| (TokenKind::Character, b))
            .chain(self.word_branch.iter().map(|b| (TokenKind::Word, b)))
    }

    pub fn max_window(&self) -> usize {
        self.branches()
            .map(|(_, b)| b.max_window())
            .max()
            .unwrap_or(1)
    }

    /// Length of the concatenated pooled vectors.
    pub fn representation_dim(&self) -> usize {
        self.branches().map(|(_, b)| b.pooled_dim()).sum()
    }

    pub fn context_dim(&self) -> usize {
        if self.use_context {
            context_dim(self.n_prev, self.label_count)
        } else {
            0
        }
    }

    pub fn reduction_input_dim(&self) -> usize {
        self.representation_dim() + self.context_dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.char_branch.is_none() && self.word_branch.is_none() {
            return Err(Error::Config(
                "model needs a char branch, a word branch, or both".into(),
            ));
        }
        for (kind, b) in self.branches() {
            b.validate(kind)?;
        }
        if self.label_count < 2 {
            return Err(Error::Config(format!(
                "label_count must be at least 2, got {}",
                self.label_count
            )));
        }
        if self.reduction_dim == 0 {
            return Err(Error::Config("reduction_dim must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!(
                "dropout {} not in [0, 1)",
                self.dropout
            )));
        }
        let t = &self.training;
        if t.patience == 0 || t.batch_size == 0 || t.max_epochs == 0 {
            return Err(Error::Config(
                "patience, batch_size and max_epochs must be at least 1".into(),
            ));
        }
        t.optimizer.validate()
    }
}
