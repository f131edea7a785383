use crate::error::{Error, Result};
use crate::nn::tensor::Tensor;

#[derive(Clone, Debug, PartialEq)]
pub struct Pooled {
    pub values: Tensor,
    /// Row that produced each channel's maximum.
    pub argmax: Vec<usize>,
}

/// Per-channel maximum over the first `valid_length` rows of an `[L, F]` input.
///
/// Rows at or beyond `valid_length` are padding and are never read. Ties go to
/// the earliest row.
pub fn max_over_time(input: &Tensor, valid_length: usize) -> Result<Pooled> {
    if input.shape().len() != 2 {
        return Err(Error::shape(
            "max_over_time",
            format!("expected [L, F], got {:?}", input.shape()),
        ));
    }
    if valid_length == 0 {
        return Err(Error::EmptySegment("max_over_time over zero rows".into()));
    }
    if valid_length > input.rows() {
        return Err(Error::shape(
            "max_over_time",
            format!("valid_length {valid_length} exceeds {} rows", input.rows()),
        ));
    }
    let channels = input.row_len();
    let mut values = input.row(0).to_vec();
    let mut argmax = vec![0; channels];
    for t in 1..valid_length {
        for (f, &v) in input.row(t).iter().enumerate() {
            if v > values[f] {
                values[f] = v;
                argmax[f] = t;
            }
        }
    }
    Ok(Pooled {
        values: Tensor::vector(&values),
        argmax,
    })
}

/// Routes each channel's gradient to its argmax row of an `[rows, F]` input.
pub fn max_over_time_backward(argmax: &[usize], grad_out: &Tensor, rows: usize) -> Tensor {
    let channels = argmax.len();
    let mut grad = Tensor::zeros(&[rows, channels]);
    let g = grad_out.data();
    let data = grad.data_mut();
    for (f, &t) in argmax.iter().enumerate() {
        data[t * channels + f] += g[f];
    }
    grad
}
