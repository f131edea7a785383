use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{tokenize, PreprocessingFlags};
use crate::corpus::Segment;
use crate::error::{Error, Result};

pub const PAD: usize = 0;
pub const UNK: usize = 1;
/// Number of reserved indices preceding the real tokens.
pub const RESERVED: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Character,
    Word,
}

impl TokenKind {
    pub fn name(self) -> &'static str {
        match self {
            TokenKind::Character => "char",
            TokenKind::Word => "word",
        }
    }
}

/// Token-to-index map with `PAD = 0`, `UNK = 1` and real tokens from 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    kind: TokenKind,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Real tokens in index order, starting at index [`RESERVED`].
    pub fn from_tokens(kind: TokenKind, tokens: Vec<String>) -> Self {
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i + RESERVED))
            .collect();
        Vocabulary {
            kind,
            tokens,
            index,
        }
    }

    /// Keeps tokens seen at least `min_count` times, ordered by descending
    /// frequency and then lexicographically.
    pub fn build<I>(kind: TokenKind, sequences: I, min_count: usize) -> Self
    where
        I: IntoIterator,
        I::Item: IntoIterator<Item = String>,
    {
        let mut counts: HashMap<String, usize> = HashMap::new();
        for seq in sequences {
            for tok in seq {
                *counts.entry(tok).or_default() += 1;
            }
        }
        let mut kept: Vec<(String, usize)> = counts
            .into_iter()
            .filter(|(_, c)| *c >= min_count.max(1))
            .collect();
        kept.sort_by(|(ta, ca), (tb, cb)| cb.cmp(ca).then_with(|| ta.cmp(tb)));
        Self::from_tokens(kind, kept.into_iter().map(|(t, _)| t).collect())
    }

    pub fn kind(&self) -> TokenKind {
        self.kind
    }

    /// Including the reserved entries.
    pub fn len(&self) -> usize {
        self.tokens.len() + RESERVED
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Index of `token`, or [`UNK`].
    pub fn index_of(&self, token: &str) -> usize {
        self.get(token).unwrap_or(UNK)
    }

    /// The token at `index`; `None` for the reserved entries.
    pub fn token(&self, index: usize) -> Option<&str> {
        index
            .checked_sub(RESERVED)
            .and_then(|i| self.tokens.get(i))
            .map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Builds a vocabulary from training segments. Segments with no tokens under
/// `flags` contribute nothing.
pub fn build_vocabulary(
    segments: &[Segment],
    kind: TokenKind,
    flags: &PreprocessingFlags,
    min_count: usize,
) -> Result<Vocabulary> {
    if segments.is_empty() {
        return Err(Error::Corpus(
            "cannot build a vocabulary from no segments".into(),
        ));
    }
    let mut sequences = Vec::with_capacity(segments.len());
    for s in segments {
        let text = flags.source_text(s)?;
        if let Ok(tokens) = tokenize(text, kind, flags) {
            sequences.push(tokens);
        }
    }
    Ok(Vocabulary::build(kind, sequences, min_count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::rng::SeededRng;

    fn segs(texts: &[&str]) -> Vec<Segment> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| Segment {
                dialog_id: "d".into(),
                position: i,
                speaker: "A".into(),
                label: "x".into(),
                text: t.to_string(),
                lemmatized_text: None,
            })
            .collect()
    }

    #[test]
    fn enumerates_tokens_with_reserved_entries() {
        let v = build_vocabulary(
            &segs(&["aa", "ab"]),
            TokenKind::Character,
            &Default::default(),
            1,
        )
        .unwrap();
        assert_eq!(v.len(), 4);
        assert_eq!(v.get("a"), Some(2));
        assert_eq!(v.get("b"), Some(3));
        assert_eq!(v.token(PAD), None);
        assert_eq!(v.token(UNK), None);
    }

    #[test]
    fn min_count_cutoff_maps_rare_tokens_to_unk() {
        let v = build_vocabulary(
            &segs(&["aa", "ab"]),
            TokenKind::Character,
            &Default::default(),
            2,
        )
        .unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v.index_of("b"), UNK);
        assert_eq!(v.index_of("a"), 2);
    }

    #[test]
    fn ties_are_broken_lexicographically() {
        let v = Vocabulary::build(
            TokenKind::Word,
            vec![vec!["b".to_string(), "a".into(), "c".into(), "c".into()]],
            1,
        );
        assert_eq!(v.tokens(), &["c", "a", "b"]);
    }

    #[test]
    fn shuffled_corpus_gives_identical_vocabulary() {
        let texts = [
            "the cat sat",
            "a dog ran",
            "the dog sat",
            "uh-huh",
            "yes .",
            "the end",
        ];
        let base =
            build_vocabulary(&segs(&texts), TokenKind::Word, &Default::default(), 1).unwrap();
        let mut rng = SeededRng::new(5);
        for _ in 0..20 {
            let mut shuffled = segs(&texts);
            rng.shuffle(&mut shuffled);
            let v = build_vocabulary(&shuffled, TokenKind::Word, &Default::default(), 1).unwrap();
            assert_eq!(v, base);
        }
    }

    #[test]
    fn empty_training_set_is_an_error() {
        assert!(build_vocabulary(&[], TokenKind::Word, &Default::default(), 1).is_err());
    }
}
