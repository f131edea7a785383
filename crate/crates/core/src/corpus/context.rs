use serde::{Deserialize, Serialize};

use super::{LabelSet, Segment};
use crate::error::{Error, Result};
use crate::nn::tensor::Tensor;

/// Where the labels of preceding segments come from at evaluation time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextSource {
    /// Annotated labels.
    #[default]
    Gold,
    /// The model's own earlier predictions.
    Predicted,
}

impl std::str::FromStr for ContextSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gold" => Ok(ContextSource::Gold),
            "predicted" => Ok(ContextSource::Predicted),
            other => Err(Error::Config(format!(
                "unknown context source {other:?} (expected gold or predicted)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub enum LabelSource<'a> {
    Gold,
    /// Label indices for the dialog's segments, in position order. Only
    /// entries before the queried position are read.
    Predicted(&'a [usize]),
}

pub fn context_dim(n_prev: usize, classes: usize) -> usize {
    n_prev * classes + 1
}

/// `n_prev` one-hot blocks (most recent first, zeros when absent) followed by
/// a speaker-change flag. `history` holds earlier labels, oldest first.
pub fn context_vector(
    history: &[usize],
    speaker_changed: bool,
    n_prev: usize,
    classes: usize,
) -> Tensor {
    let mut v = vec![0.0; context_dim(n_prev, classes)];
    for (block, &label) in history.iter().rev().take(n_prev).enumerate() {
        v[block * classes + label] = 1.0;
    }
    if speaker_changed {
        v[n_prev * classes] = 1.0;
    }
    Tensor::vector(&v)
}

/// Context features for every segment of one dialog (ordered by position).
pub fn extract_context(
    dialog: &[Segment],
    labels: &LabelSet,
    n_prev: usize,
    source: LabelSource<'_>,
) -> Result<Vec<Tensor>> {
    let history: Vec<usize> = match source {
        LabelSource::Gold => dialog
            .iter()
            .map(|s| {
                labels.index_of(&s.label).ok_or_else(|| {
                    Error::Corpus(format!("label {:?} not in the label set", s.label))
                })
            })
            .collect::<Result<_>>()?,
        LabelSource::Predicted(preds) => {
            let needed = dialog.len().saturating_sub(1);
            if preds.len() < needed {
                return Err(Error::Config(format!(
                    "predicted context needs labels for {needed} earlier segments, got {}",
                    preds.len()
                )));
            }
            if let Some(&bad) = preds[..needed].iter().find(|&&p| p >= labels.len()) {
                return Err(Error::Config(format!("predicted label {bad} out of range")));
            }
            preds[..needed].to_vec()
        }
    };
    Ok(dialog
        .iter()
        .enumerate()
        .map(|(p, seg)| {
            let changed = p > 0 && dialog[p - 1].speaker != seg.speaker;
            context_vector(&history[..p], changed, n_prev, labels.len())
        })
        .collect())
}
