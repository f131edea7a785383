use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::init::EMBEDDING_INIT_RANGE;
use crate::nn::rng::{streams, SeededRng};
use crate::nn::tensor::Tensor;
use crate::textprep::{Vocabulary, PAD, RESERVED};

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingCoverage {
    /// Vocabulary tokens, excluding the reserved entries.
    pub tokens: usize,
    pub found: usize,
}

impl EmbeddingCoverage {
    /// Fraction of vocabulary tokens with no vector in the file.
    pub fn missing_fraction(&self) -> f64 {
        if self.tokens == 0 {
            0.0
        } else {
            (self.tokens - self.found) as f64 / self.tokens as f64
        }
    }
}

/// Vectors from an embedding file for the tokens of one vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingRows {
    pub dim: usize,
    pub rows: HashMap<usize, Vec<f64>>,
    pub coverage: EmbeddingCoverage,
}

/// Scans a text embedding file, keeping vectors for tokens in `vocab`.
///
/// Each line is a token followed by space-separated floats. A first line of
/// exactly two integers is a `count dim` header and is skipped. Every line
/// must have the same dimensionality.
pub fn read_embedding_rows(path: &Path, vocab: &Vocabulary) -> Result<EmbeddingRows> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut dim: Option<usize> = None;
    let mut rows: HashMap<usize, Vec<f64>> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches(['\n', '\r', ' ']);
        if line.is_empty() {
            continue;
        }
        let (token, rest) = line.split_once(' ').unwrap_or((line, ""));
        let fields: Vec<&str> = rest.split(' ').filter(|f| !f.is_empty()).collect();
        if i == 0
            && fields.len() == 1
            && token.parse::<u64>().is_ok()
            && fields[0].parse::<u64>().is_ok()
        {
            continue;
        }
        match dim {
            None => dim = Some(fields.len()),
            Some(d) if d != fields.len() => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    msg: format!(
                        "vector for {token:?} has {} values, expected {d}",
                        fields.len()
                    ),
                })
            }
            _ => {}
        }
        if fields.is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("no vector values for {token:?}"),
            });
        }
        let Some(index) = vocab.get(token) else {
            continue;
        };
        if rows.contains_key(&index) {
            continue;
        }
        let values = fields
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("bad float in vector for {token:?}: {e}"),
            })?;
        rows.insert(index, values);
    }
    let dim =
        dim.ok_or_else(|| Error::Embedding(format!("{} contains no vectors", path.display())))?;
    let coverage = EmbeddingCoverage {
        tokens: vocab.len() - RESERVED,
        found: rows.len(),
    };
    Ok(EmbeddingRows {
        dim,
        rows,
        coverage,
    })
}

/// Builds the `[V, dim]` table: file vectors where available, zeros for the
/// padding row and `U(-0.05, 0.05)` drawn from `seed` everywhere else.
pub fn assemble_table(vocab_len: usize, rows: &EmbeddingRows, seed: u64) -> Tensor {
    let mut rng = SeededRng::stream(seed, streams::EMBEDDINGS);
    let mut table = Tensor::zeros(&[vocab_len, rows.dim]);
    for r in 0..vocab_len {
        let row = table.row_mut(r);
        for x in row.iter_mut() {
            *x = rng.uniform(-EMBEDDING_INIT_RANGE, EMBEDDING_INIT_RANGE);
        }
        if r == PAD {
            row.fill(0.0);
        } else if let Some(v) = rows.rows.get(&r) {
            row.copy_from_slice(v);
        }
    }
    table
}

/// Reads `path` and returns the table for `vocab` together with coverage.
/// `expected_dim`, when given, must match the file.
pub fn load_embeddings(
    path: &Path,
    vocab: &Vocabulary,
    expected_dim: Option<usize>,
    seed: u64,
) -> Result<(Tensor, EmbeddingCoverage)> {
    let rows = read_embedding_rows(path, vocab)?;
    if let Some(d) = expected_dim {
        if d != rows.dim {
            return Err(Error::Embedding(format!(
                "{} has {}-dimensional vectors but the model expects {d}",
                path.display(),
                rows.dim
            )));
        }
    }
    let table = assemble_table(vocab.len(), &rows, seed);
    Ok((table, rows.coverage))
}
