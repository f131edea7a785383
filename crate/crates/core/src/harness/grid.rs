//! The ablation grid: word-embedding variants, character window sweep,
//! character preprocessing variants, and the combined char+word models.

use std::path::PathBuf;

use crate::corpus::{read_corpus, resolve_splits, ContextSource, SplitManifest};
use crate::error::Result;
use crate::harness::experiment::{run_on_splits, ExperimentResult, ExperimentSpec};
use crate::model::{BranchConfig, EmbeddingMode, ModelConfig};
use crate::textprep::{PreprocessingFlags, TokenKind};

pub const WORD_WINDOWS: [usize; 3] = [1, 2, 3];
pub const CHAR_WINDOWS: [usize; 3] = [3, 5, 7];
pub const WINDOW_SWEEP: [usize; 7] = [1, 2, 3, 4, 5, 7, 10];

#[derive(Clone, Debug)]
pub struct GridOptions {
    pub corpus: PathBuf,
    pub manifest: PathBuf,
    /// Word vectors; rows that need them are skipped without.
    pub embeddings: Option<PathBuf>,
    pub seeds: Vec<u64>,
    /// Dimensions and training settings shared by every row. Its branch
    /// settings serve as templates; window sizes and modes are set per row.
    pub base: ModelConfig,
}

#[derive(Clone, Debug, Default)]
pub struct GridPlan {
    pub specs: Vec<ExperimentSpec>,
    pub notes: Vec<String>,
}

const PLAIN: PreprocessingFlags = PreprocessingFlags {
    keep_capitalization: false,
    keep_punctuation: false,
    use_lemmatized_text: false,
};
const CAPITALIZED: PreprocessingFlags = PreprocessingFlags {
    keep_capitalization: true,
    ..PLAIN
};
const PUNCTUATED: PreprocessingFlags = PreprocessingFlags {
    keep_punctuation: true,
    ..PLAIN
};
const CAP_PUNCT: PreprocessingFlags = PreprocessingFlags {
    keep_capitalization: true,
    keep_punctuation: true,
    ..PLAIN
};
const LEMMATIZED: PreprocessingFlags = PreprocessingFlags {
    use_lemmatized_text: true,
    ..PLAIN
};

/// Name, char branch, word branch, use_context, flags.
type GridRow = (
    String,
    Option<BranchConfig>,
    Option<BranchConfig>,
    bool,
    PreprocessingFlags,
);

/// Builds the named grid rows. `has_lemmas` says whether the corpus carries a
/// lemmatized column.

pub fn paper_grid(opts: &GridOptions, has_lemmas: bool) -> GridPlan {
    let mut plan = GridPlan::default();
    let char_template = opts
        .base
        .char_branch
        .clone()
        .unwrap_or_else(|| BranchConfig::default_for(TokenKind::Character));
    let word_template = opts
        .base
        .word_branch
        .clone()
        .unwrap_or_else(|| BranchConfig::default_for(TokenKind::Word));
    let char_branch = |windows: &[usize]| BranchConfig {
        window_sizes: windows.to_vec(),
        ..char_template.clone()
    };
    let word_branch = |mode: EmbeddingMode| {
        let pretrained = mode.is_pretrained();
        BranchConfig {
            window_sizes: WORD_WINDOWS.to_vec(),
            embedding_mode: mode,
            embedding_file: if pretrained {
                opts.embeddings.clone()
            } else {
                None
            },
            ..word_template.clone()
        }
    };
    let mut rows: Vec<GridRow> = Vec::new();
    let mut push = |name: &str, char_b, word_b, context, flags| {
        rows.push((name.to_string(), char_b, word_b, context, flags))
    };

    push(
        "word/random",
        None,
        Some(word_branch(EmbeddingMode::RandomTrainable)),
        false,
        PLAIN,
    );
    push(
        "word/pretrained",
        None,
        Some(word_branch(EmbeddingMode::PretrainedFixed)),
        false,
        PLAIN,
    );
    push(
        "word/pretrained+context",
        None,
        Some(word_branch(EmbeddingMode::PretrainedFixed)),
        true,
        PLAIN,
    );

    for w in WINDOW_SWEEP {
        push(
            &format!("char/window-{w}"),
            Some(char_branch(&[w])),
            None,
            false,
            PLAIN,
        );
    }
    push(
        "char/window-3-5-7",
        Some(char_branch(&CHAR_WINDOWS)),
        None,
        false,
        PLAIN,
    );

    push(
        "char/capitalized",
        Some(char_branch(&CHAR_WINDOWS)),
        None,
        false,
        CAPITALIZED,
    );
    push(
        "char/punctuated",
        Some(char_branch(&CHAR_WINDOWS)),
        None,
        false,
        PUNCTUATED,
    );
    push(
        "char/capitalized+punctuated",
        Some(char_branch(&CHAR_WINDOWS)),
        None,
        false,
        CAP_PUNCT,
    );
    if has_lemmas {
        push(
            "char/lemmatized",
            Some(char_branch(&CHAR_WINDOWS)),
            None,
            false,
            LEMMATIZED,
        );
    }

    // Which preprocessing the combined model should use is corpus dependent,
    // so both candidates run. Without vectors the word branch is random.
    let combined_mode = if opts.embeddings.is_some() {
        EmbeddingMode::PretrainedFixed
    } else {
        EmbeddingMode::RandomTrainable
    };
    for (suffix, flags) in [
        ("punctuated", PUNCTUATED),
        ("capitalized+punctuated", CAP_PUNCT),
    ] {
        for (prefix, context) in [("char+word", false), ("char+word+context", true)] {
            push(
                &format!("{prefix}/{suffix}"),
                Some(char_branch(&CHAR_WINDOWS)),
                Some(word_branch(combined_mode)),
                context,
                flags,
            );
        }
    }

    if !has_lemmas {
        plan.notes
            .push("char/lemmatized: skipped, corpus has no lemmatized_text column".into());
    }
    if opts.embeddings.is_none() {
        plan.notes
            .push("char+word rows use random word embeddings (no embedding file given)".into());
    }
    for (name, char_b, word_b, context, flags) in rows {
        let needs_vectors = word_b
            .as_ref()
            .is_some_and(|w| w.embedding_mode.is_pretrained());
        if needs_vectors && opts.embeddings.is_none() {
            plan.notes
                .push(format!("{name}: skipped, no word embedding file given"));
            continue;
        }
        plan.specs.push(ExperimentSpec {
            name,
            config: ModelConfig {
                char_branch: char_b,
                word_branch: word_b,
                use_context: context,
                ..opts.base.clone()
            },
            flags,
            context_source: ContextSource::Gold,
            corpus: opts.corpus.clone(),
            manifest: opts.manifest.clone(),
            seeds: opts.seeds.clone(),
        });
    }
    plan
}

/// Loads the corpus once and runs every grid row in order.
pub fn run_grid(opts: &GridOptions) -> Result<(Vec<ExperimentResult>, Vec<String>)> {
    let corpus = read_corpus(&opts.corpus)?;
    let manifest = SplitManifest::read(&opts.manifest)?;
    let splits = resolve_splits(&corpus.segments, &manifest)?;
    let plan = paper_grid(opts, corpus.has_lemmas);
    let mut notes = plan.notes;
    let mut results = Vec::with_capacity(plan.specs.len());
    for spec in &plan.specs {
        log::info!("running {}", spec.name);
        let r = run_on_splits(spec, &corpus, &splits)?;
        notes.extend(r.notes.iter().cloned());
        results.push(r);
    }
    Ok((results, notes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(embeddings: Option<&str>) -> GridOptions {
        GridOptions {
            corpus: "c.tsv".into(),
            manifest: "m.txt".into(),
            embeddings: embeddings.map(PathBuf::from),
            seeds: vec![1, 2],
            base: ModelConfig::default(),
        }
    }

    fn names(plan: &GridPlan) -> Vec<&str> {
        plan.specs.iter().map(|s| s.name.as_str()).collect()
    }

    #[test]
    fn full_grid_with_vectors_and_lemmas() {
        let plan = paper_grid(&opts(Some("v.txt")), true);
        assert_eq!(plan.specs.len(), 3 + 8 + 4 + 4);
        let n = names(&plan);
        assert!(
            n.contains(&"char/window-10")
                && n.contains(&"char+word+context/capitalized+punctuated")
        );
        let ctx = plan
            .specs
            .iter()
            .find(|s| s.name == "word/pretrained+context")
            .unwrap();
        assert!(ctx.config.use_context);
        assert_eq!(
            ctx.config
                .word_branch
                .as_ref()
                .unwrap()
                .embedding_file
                .as_deref(),
            Some(std::path::Path::new("v.txt"))
        );
        for s in &plan.specs {
            s.validate().unwrap();
        }
    }

    #[test]
    fn rows_needing_missing_inputs_are_skipped_with_notes() {
        let plan = paper_grid(&opts(None), false);
        let n = names(&plan);
        assert!(n.contains(&"word/random"));
        assert!(!n.contains(&"word/pretrained") && !n.contains(&"char/lemmatized"));
        assert_eq!(plan.specs.len(), 1 + 8 + 3 + 4);
        assert_eq!(plan.notes.len(), 4);
        let combined = plan
            .specs
            .iter()
            .find(|s| s.name == "char+word/punctuated")
            .unwrap();
        assert_eq!(
            combined.config.word_branch.as_ref().unwrap().embedding_mode,
            EmbeddingMode::RandomTrainable
        );
    }
}
