use rayon::prelude::*;

use crate::corpus::{context_vector, ContextSource};
use crate::error::Result;
use crate::harness::data::dialog_ranges;
use crate::model::Model;
use crate::textprep::EncodedSegment;

/// Segment-level (micro) accuracy with a confusion matrix indexed
/// `[gold][predicted]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub correct: usize,
    pub total: usize,
    pub confusion: Vec<Vec<usize>>,
}

impl Evaluation {
    pub fn new(classes: usize) -> Self {
        Evaluation {
            correct: 0,
            total: 0,
            confusion: vec![vec![0; classes]; classes],
        }
    }

    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            return f64::NAN;
        }
        self.correct as f64 / self.total as f64
    }

    pub fn record(&mut self, gold: usize, predicted: usize) {
        self.total += 1;
        if gold == predicted {
            self.correct += 1;
        }
        self.confusion[gold][predicted] += 1;
    }

    /// Pools counts, as for a micro-average over folds.
    pub fn merge(&mut self, other: &Evaluation) {
        self.correct += other.correct;
        self.total += other.total;
        for (row, o) in self.confusion.iter_mut().zip(&other.confusion) {
            for (a, b) in row.iter_mut().zip(o) {
                *a += b;
            }
        }
    }
}

/// Predictions for segments grouped by dialog in position order. With a
/// predicted context source each segment's history is the model's own
/// earlier predictions, so no gold label is read.
pub fn predict_dialogs(
    model: &Model,
    segments: &[EncodedSegment],
    source: ContextSource,
) -> Result<Vec<usize>> {
    let cfg = model.config();
    let per_dialog: Vec<Vec<usize>> = dialog_ranges(segments)
        .into_par_iter()
        .map(|range| {
            let dialog = &segments[range];
            let mut predictions = Vec::with_capacity(dialog.len());
            for (p, s) in dialog.iter().enumerate() {
                let prediction = if cfg.use_context {
                    let history: Vec<usize> = match source {
                        ContextSource::Gold => dialog[..p].iter().map(|d| d.label).collect(),
                        ContextSource::Predicted => predictions.clone(),
                    };
                    let changed = p > 0 && dialog[p - 1].speaker != s.speaker;
                    let ctx = context_vector(&history, changed, cfg.n_prev, cfg.label_count);
                    model.predict(s, Some(&ctx))?
                } else {
                    model.predict(s, None)?
                };
                predictions.push(prediction);
            }
            Ok(predictions)
        })
        .collect::<Result<_>>()?;
    Ok(per_dialog.into_iter().flatten().collect())
}

pub fn evaluate(
    model: &Model,
    segments: &[EncodedSegment],
    source: ContextSource,
) -> Result<Evaluation> {
    let predictions = predict_dialogs(model, segments, source)?;
    let mut eval = Evaluation::new(model.label_count());
    for (s, &p) in segments.iter().zip(&predictions) {
        eval.record(s.label, p);
    }
    Ok(eval)
}
