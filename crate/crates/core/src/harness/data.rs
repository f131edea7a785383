use crate::corpus::{context_vector, LabelSet, Segment};
use crate::error::{Error, Result};
use crate::model::{ModelConfig, VocabSizes};
use crate::nn::tensor::Tensor;
use crate::textprep::{
    build_vocabulary, encode, EncodedSegment, PadLengths, PreprocessingFlags, TokenKind, Vocabulary,
};

/// Vocabularies and pad lengths fitted on a training split.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoder {
    pub char_vocab: Vocabulary,
    pub word_vocab: Vocabulary,
    pub labels: LabelSet,
    pub flags: PreprocessingFlags,
    pub pad: PadLengths,
}

impl Encoder {
    /// Fits on `train` only. Both vocabularies are always built so that any
    /// segment can be encoded regardless of which branches are enabled.
    pub fn fit(
        train: &[Segment],
        labels: LabelSet,
        flags: PreprocessingFlags,
        config: &ModelConfig,
    ) -> Result<Self> {
        let char_min = config.char_branch.as_ref().map_or(1, |b| b.min_count);
        let word_min = config.word_branch.as_ref().map_or(1, |b| b.min_count);
        Ok(Encoder {
            char_vocab: build_vocabulary(train, TokenKind::Character, &flags, char_min)?,
            word_vocab: build_vocabulary(train, TokenKind::Word, &flags, word_min)?,
            pad: PadLengths::from_training(train, &flags, config.max_window())?,
            labels,
            flags,
        })
    }

    pub fn vocab_sizes(&self) -> VocabSizes {
        VocabSizes {
            chars: self.char_vocab.len(),
            words: self.word_vocab.len(),
        }
    }

    pub fn encode(&self, segment: &Segment) -> Result<EncodedSegment> {
        encode(
            segment,
            &self.char_vocab,
            &self.word_vocab,
            &self.labels,
            &self.flags,
            self.pad,
        )
    }

    /// Encodes every segment, skipping (and counting) those that tokenise to
    /// nothing under the preprocessing flags.
    pub fn encode_all(&self, segments: &[Segment]) -> Result<(Vec<EncodedSegment>, usize)> {
        let mut out = Vec::with_capacity(segments.len());
        let mut skipped = 0;
        for s in segments {
            match self.encode(s) {
                Ok(e) => out.push(e),
                Err(Error::EmptySegment(msg)) => {
                    log::debug!("skipping {msg}");
                    skipped += 1;
                }
                Err(e) => return Err(e),
            }
        }
        Ok((out, skipped))
    }
}

/// Half-open index ranges of consecutive segments sharing a dialog id.
pub fn dialog_ranges(segments: &[EncodedSegment]) -> Vec<std::ops::Range<usize>> {
    let mut ranges = Vec::new();
    let mut start = 0;
    for i in 1..=segments.len() {
        if i == segments.len() || segments[i].dialog_id != segments[start].dialog_id {
            if i > start {
                ranges.push(start..i);
            }
            start = i;
        }
    }
    ranges
}

/// Context vectors built from the gold labels of earlier segments in each
/// dialog. Segments must be grouped by dialog and ordered by position.
pub fn gold_contexts(segments: &[EncodedSegment], n_prev: usize, classes: usize) -> Vec<Tensor> {
    let mut out = Vec::with_capacity(segments.len());
    for range in dialog_ranges(segments) {
        let dialog = &segments[range];
        let history: Vec<usize> = dialog.iter().map(|s| s.label).collect();
        for (p, s) in dialog.iter().enumerate() {
            let changed = p > 0 && dialog[p - 1].speaker != s.speaker;
            out.push(context_vector(&history[..p], changed, n_prev, classes));
        }
    }
    out
}
