use crate::error::{Error, Result};
use crate::nn::init::embedding_uniform;
use crate::nn::param::Parameter;
use crate::nn::rng::SeededRng;
use crate::nn::tensor::Tensor;

/// Token lookup table of shape `[vocab, dim]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    pub table: Parameter,
}

impl Embedding {
    pub fn new(table: Parameter) -> Result<Self> {
        if table.shape().len() != 2 {
            return Err(Error::shape(
                "embedding",
                format!("table must be 2-D, got {:?}", table.shape()),
            ));
        }
        Ok(Embedding { table })
    }

    /// Random `U(-0.05, 0.05)` table. The padding row, if any, is zero and pinned.
    pub fn random(
        vocab: usize,
        dim: usize,
        trainable: bool,
        padding_index: Option<usize>,
        rng: &mut SeededRng,
    ) -> Self {
        let mut value = embedding_uniform(vocab, dim, rng);
        let mut table = Parameter::new(Tensor::zeros(&[vocab, dim]), trainable);
        if let Some(pad) = padding_index {
            value.row_mut(pad).fill(0.0);
            table = table.with_pinned_rows(&[pad]);
        }
        table.value = value;
        Embedding { table }
    }

    pub fn vocab_size(&self) -> usize {
        self.table.shape()[0]
    }

    pub fn dim(&self) -> usize {
        self.table.shape()[1]
    }

    /// Row `i` of the output is row `indices[i]` of the table.
    pub fn forward(&self, indices: &[usize]) -> Result<Tensor> {
        if indices.is_empty() {
            return Err(Error::EmptySegment("no tokens to embed".into()));
        }
        let vocab = self.vocab_size();
        let dim = self.dim();
        let mut out = Vec::with_capacity(indices.len() * dim);
        for &ix in indices {
            if ix >= vocab {
                return Err(Error::IndexOutOfRange {
                    index: ix,
                    size: vocab,
                });
            }
            out.extend_from_slice(self.table.value.row(ix));
        }
        Tensor::from_vec(&[indices.len(), dim], out)
    }

    pub fn backward(&mut self, indices: &[usize], grad_out: &Tensor) {
        if !self.table.trainable {
            return;
        }
        debug_assert_eq!(grad_out.rows(), indices.len());
        for (pos, &ix) in indices.iter().enumerate() {
            if self.table.is_row_pinned(ix) {
                continue;
            }
            let g = grad_out.row(pos);
            for (acc, &gv) in self.table.grad.row_mut(ix).iter_mut().zip(g) {
                *acc += gv;
            }
        }
    }
}
