//! Segment text to index sequences: tokenisation under the preprocessing
//! variants, vocabularies built from training data, and padded encoding.

mod encode;
mod tokenize;
mod vocab;

use serde::{Deserialize, Serialize};

use crate::corpus::Segment;
use crate::error::{Error, Result};

pub use encode::{decode, encode, EncodedSegment, IndexSequence, PadLengths};
pub use tokenize::{char_tokenize, is_punctuation, tokenize, word_tokenize};
pub use vocab::{build_vocabulary, TokenKind, Vocabulary, PAD, RESERVED, UNK};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreprocessingFlags {
    pub keep_capitalization: bool,
    pub keep_punctuation: bool,
    pub use_lemmatized_text: bool,
}

impl PreprocessingFlags {
    /// The text column these flags select for `segment`.
    pub fn source_text<'a>(&self, segment: &'a Segment) -> Result<&'a str> {
        if !self.use_lemmatized_text {
            return Ok(&segment.text);
        }
        segment.lemmatized_text.as_deref().ok_or_else(|| {
            Error::Corpus(format!(
                "segment ({}, {}) has no lemmatized text",
                segment.dialog_id, segment.position
            ))
        })
    }
}
