use serde::{Deserialize, Serialize};

use super::{char_tokenize, word_tokenize, PreprocessingFlags, TokenKind, Vocabulary, PAD};
use crate::corpus::{LabelSet, Segment};
use crate::error::{Error, Result};

/// Right-padded indices; entries at or beyond `valid_length` are [`PAD`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSequence {
    pub indices: Vec<usize>,
    pub valid_length: usize,
}

impl IndexSequence {
    fn from_tokens(tokens: &[String], vocab: &Vocabulary, pad_to: usize) -> Self {
        let valid_length = tokens.len().min(pad_to);
        let mut indices: Vec<usize> = tokens[..valid_length]
            .iter()
            .map(|t| vocab.index_of(t))
            .collect();
        indices.resize(pad_to, PAD);
        IndexSequence {
            indices,
            valid_length,
        }
    }

    pub fn valid(&self) -> &[usize] {
        &self.indices[..self.valid_length]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedSegment {
    pub chars: IndexSequence,
    pub words: IndexSequence,
    pub label: usize,
    pub dialog_id: String,
    pub position: usize,
    pub speaker: String,
}

impl EncodedSegment {
    pub fn sequence(&self, kind: TokenKind) -> &IndexSequence {
        match kind {
            TokenKind::Character => &self.chars,
            TokenKind::Word => &self.words,
        }
    }
}

/// Padded lengths for character and word sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadLengths {
    pub chars: usize,
    pub words: usize,
}

impl PadLengths {
    /// Longest training sequence of each kind, but never below `min_length`
    /// (the largest convolution window).
    pub fn from_training(
        segments: &[Segment],
        flags: &PreprocessingFlags,
        min_length: usize,
    ) -> Result<Self> {
        let mut pad = PadLengths {
            chars: min_length.max(1),
            words: min_length.max(1),
        };
        for s in segments {
            let text = flags.source_text(s)?;
            if let (Ok(c), Ok(w)) = (char_tokenize(text, flags), word_tokenize(text, flags)) {
                pad.chars = pad.chars.max(c.len());
                pad.words = pad.words.max(w.len());
            }
        }
        Ok(pad)
    }
}

/// Tokenises and indexes one segment. Longer sequences are truncated to the
/// pad length. Segments with no character or no word tokens are rejected.
pub fn encode(
    segment: &Segment,
    char_vocab: &Vocabulary,
    word_vocab: &Vocabulary,
    labels: &LabelSet,
    flags: &PreprocessingFlags,
    pad: PadLengths,
) -> Result<EncodedSegment> {
    let text = flags.source_text(segment)?;
    let reject = |e: Error| match e {
        Error::EmptySegment(msg) => Error::EmptySegment(format!(
            "segment ({}, {}): {msg}",
            segment.dialog_id, segment.position
        )),
        other => other,
    };
    let chars = char_tokenize(text, flags).map_err(reject)?;
    let words = word_tokenize(text, flags).map_err(reject)?;
    let label = labels
        .index_of(&segment.label)
        .ok_or_else(|| Error::Corpus(format!("label {:?} not in the label set", segment.label)))?;
    Ok(EncodedSegment {
        chars: IndexSequence::from_tokens(&chars, char_vocab, pad.chars),
        words: IndexSequence::from_tokens(&words, word_vocab, pad.words),
        label,
        dialog_id: segment.dialog_id.clone(),
        position: segment.position,
        speaker: segment.speaker.clone(),
    })
}

/// Tokens at the valid positions; `None` marks an unknown token.
pub fn decode(sequence: &IndexSequence, vocab: &Vocabulary) -> Vec<Option<String>> {
    sequence
        .valid()
        .iter()
        .map(|&i| vocab.token(i).map(str::to_string))
        .collect()
}
