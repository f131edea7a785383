//! Convolutional dialog act classifiers and their on-disk checkpoints.

mod checkpoint;
mod config;
mod network;

pub use checkpoint::{ModelBundle, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use config::{BranchConfig, EmbeddingMode, ModelConfig, TrainingConfig};
pub use network::{BatchObjective, Branch, Example, Model, VocabSizes};
