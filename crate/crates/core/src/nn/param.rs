use crate::nn::tensor::Tensor;

/// A learnable tensor together with its accumulated gradient.
///
/// `pinned_rows` are rows that never change even when the parameter is
/// trainable. The embedding tables use this to keep the padding row at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Parameter {
    pub value: Tensor,
    pub grad: Tensor,
    pub trainable: bool,
    pinned_rows: Vec<usize>,
}

impl Parameter {
    pub fn new(value: Tensor, trainable: bool) -> Self {
        let grad = Tensor::zeros(value.shape());
        Parameter {
            value,
            grad,
            trainable,
            pinned_rows: Vec::new(),
        }
    }

    pub fn with_pinned_rows(mut self, rows: &[usize]) -> Self {
        self.pinned_rows = rows.to_vec();
        self.pinned_rows.sort_unstable();
        self.pinned_rows.dedup();
        self
    }

    pub fn pinned_rows(&self) -> &[usize] {
        &self.pinned_rows
    }

    pub fn is_row_pinned(&self, row: usize) -> bool {
        self.pinned_rows.binary_search(&row).is_ok()
    }

    /// Whether the flat element `idx` may be changed by training.
    pub fn is_element_free(&self, idx: usize) -> bool {
        self.trainable && !self.is_row_pinned(idx / self.value.row_len())
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(0.0);
    }

    pub fn shape(&self) -> &[usize] {
        self.value.shape()
    }
}
