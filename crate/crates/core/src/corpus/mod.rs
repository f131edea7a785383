//! Corpus ingestion: the TSV segment format, split manifests, pre-trained
//! embedding files and context features built from preceding segments.

mod context;
mod embeddings;
mod splits;
mod tsv;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use context::{context_dim, context_vector, extract_context, ContextSource, LabelSource};
pub use embeddings::{
    assemble_table, load_embeddings, read_embedding_rows, EmbeddingCoverage, EmbeddingRows,
};
pub use splits::{resolve_splits, ResolvedSplits, SplitManifest, SplitSet, VALIDATION_FRACTION};
pub use tsv::{parse_corpus, read_corpus, write_corpus, Corpus, HEADER, HEADER_WITH_LEMMAS};

/// One labelled unit of a dialog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub dialog_id: String,
    pub position: usize,
    pub speaker: String,
    pub label: String,
    pub text: String,
    pub lemmatized_text: Option<String>,
}

/// Sorted, de-duplicated label inventory. Indices follow sort order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LabelSet {
    labels: Vec<String>,
}

impl LabelSet {
    pub fn new<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
        LabelSet {
            labels: set.into_iter().collect(),
        }
    }

    pub fn from_segments(segments: &[Segment]) -> Self {
        Self::new(segments.iter().map(|s| s.label.as_str()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_indices_follow_sorted_order() {
        let set = LabelSet::new(["sv", "b", "qy", "b"]);
        assert_eq!(set.len(), 3);
        assert_eq!(set.labels(), &["b", "qy", "sv"]);
        assert_eq!(set.index_of("qy"), Some(1));
        assert_eq!(set.index_of("x"), None);
        assert_eq!(set.label(2), Some("sv"));
    }
}
