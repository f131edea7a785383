//! Fixtures shared by the benchmarks.

use dialact_core::corpus::{LabelSet, Segment};
use dialact_core::harness::{gold_contexts, Encoder};
use dialact_core::model::{BranchConfig, EmbeddingMode, Model, ModelConfig};
use dialact_core::nn::Tensor;
use dialact_core::synthetic;
use dialact_core::textprep::{EncodedSegment, PreprocessingFlags};

/// An encoded synthetic corpus with an untrained model.
pub struct Fixture {
    pub model: Model,
    pub segments: Vec<EncodedSegment>,
    pub contexts: Vec<Tensor>,
}

/// Paper-sized dual-branch model with context: char (3,5,7) and word (1,2,3),
/// 100 filters each.
pub fn dual_branch_config() -> ModelConfig {
    ModelConfig {
        word_branch: Some(BranchConfig {
            embedding_mode: EmbeddingMode::RandomTrainable,
            ..BranchConfig::word(&[1, 2, 3])
        }),
        use_context: true,
        ..ModelConfig::default()
    }
}

pub fn fixture(config: &ModelConfig, dialogs: usize) -> Fixture {
    let raw: Vec<Segment> = synthetic::random_dialogs(dialogs, 1);
    let labels = LabelSet::from_segments(&raw);
    let config = ModelConfig {
        label_count: labels.len(),
        ..config.clone()
    };
    let flags = PreprocessingFlags {
        keep_punctuation: true,
        ..Default::default()
    };
    let encoder = Encoder::fit(&raw, labels, flags, &config).expect("synthetic corpus encodes");
    let (segments, _) = encoder.encode_all(&raw).expect("synthetic corpus encodes");
    let contexts = gold_contexts(&segments, config.n_prev, config.label_count);
    let model = Model::build(&config, encoder.vocab_sizes(), None).expect("valid config");
    Fixture {
        model,
        segments,
        contexts,
    }
}
