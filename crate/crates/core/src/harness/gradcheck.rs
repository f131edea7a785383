use crate::corpus::context_vector;
use crate::error::Result;
use crate::model::{BatchObjective, Example, Model, ModelConfig, VocabSizes};
use crate::nn::gradcheck::{gradient_check_sampled, GradCheckReport};
use crate::nn::rng::SeededRng;
use crate::nn::tensor::Tensor;
use crate::textprep::{EncodedSegment, IndexSequence, PAD};

const TOY_VOCAB: usize = 12;
const TOY_CLASSES: usize = 4;

fn toy_sequence(rng: &mut SeededRng, len: usize, pad_to: usize) -> IndexSequence {
    let mut indices: Vec<usize> = (0..len).map(|_| 1 + rng.below(TOY_VOCAB - 1)).collect();
    indices.resize(pad_to.max(len), PAD);
    IndexSequence {
        indices,
        valid_length: len,
    }
}

/// Checks a model built from `config` on a seeded 3-segment toy batch (with
/// context when the config uses it). A label count below 2 is replaced by 4.
/// `limit` caps the elements checked per parameter.
pub fn check_config(
    config: &ModelConfig,
    step: f64,
    tolerance: f64,
    limit: Option<usize>,
) -> Result<GradCheckReport> {
    let mut config = config.clone();
    if config.label_count < 2 {
        config.label_count = TOY_CLASSES;
    }
    for b in config.word_branch.iter_mut() {
        b.embedding_file = None;
    }
    config.validate()?;
    let mut rng = SeededRng::new(config.seed ^ 0x6772_6164);
    let pretrained = config
        .word_branch
        .as_ref()
        .filter(|b| b.embedding_mode.is_pretrained())
        .map(|b| Tensor::uniform(&[TOY_VOCAB, b.embedding_dim], -0.5, 0.5, &mut rng));
    let sizes = VocabSizes {
        chars: TOY_VOCAB,
        words: TOY_VOCAB,
    };
    let mut model = Model::build(&config, sizes, pretrained)?;
    let pad = config.max_window() + 6;
    let segments: Vec<EncodedSegment> = (0..3)
        .map(|i| EncodedSegment {
            chars: toy_sequence(&mut rng, 3 + 2 * i, pad),
            words: toy_sequence(&mut rng, 1 + i, pad),
            label: i % config.label_count,
            dialog_id: "toy".into(),
            position: i,
            speaker: if i == 1 { "B" } else { "A" }.into(),
        })
        .collect();
    let contexts: Vec<Tensor> = (0..3)
        .map(|i| {
            let history: Vec<usize> = segments[..i].iter().map(|s| s.label).collect();
            context_vector(&history, i == 1, config.n_prev, config.label_count)
        })
        .collect();
    let batch = segments
        .iter()
        .zip(&contexts)
        .map(|(s, c)| Example {
            segment: s,
            context: config.use_context.then_some(c),
        })
        .collect();
    let mut objective = BatchObjective {
        model: &mut model,
        batch,
    };
    gradient_check_sampled(&mut objective, step, tolerance, limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BranchConfig;
    use crate::nn::gradcheck::DEFAULT_STEP;

    #[test]
    fn small_dual_branch_config_passes() {
        let config = ModelConfig {
            char_branch: Some(BranchConfig {
                filters_per_window: 4,
                embedding_dim: 5,
                ..BranchConfig::character(&[1, 3])
            }),
            word_branch: Some(BranchConfig {
                filters_per_window: 3,
                embedding_dim: 4,
                ..BranchConfig::word(&[1, 2])
            }),
            use_context: true,
            reduction_dim: 8,
            ..Default::default()
        };
        let report = check_config(&config, DEFAULT_STEP, 1e-4, None).unwrap();
        assert!(report.passed(), "{:?}", report.worst());
        let frozen = report
            .parameters
            .iter()
            .find(|p| p.name == "word.embedding")
            .unwrap();
        assert_eq!(frozen.elements_checked, 0);
    }
}
