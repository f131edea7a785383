use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::init::glorot_uniform;
use crate::nn::param::Parameter;
use crate::nn::rng::SeededRng;
use crate::nn::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvSpec {
    /// Context window in tokens.
    pub window: usize,
    pub filters: usize,
    pub input_dim: usize,
}

impl ConvSpec {
    pub fn new(window: usize, filters: usize, input_dim: usize) -> Result<Self> {
        if window == 0 || filters == 0 || input_dim == 0 {
            return Err(Error::Config(format!(
                "convolution needs positive window/filters/input_dim, got {window}/{filters}/{input_dim}"
            )));
        }
        Ok(ConvSpec {
            window,
            filters,
            input_dim,
        })
    }

    /// Zero rows added before the first token. The remaining `window - 1 - left`
    /// go after the last one, so the output has as many rows as the input.
    pub fn left_padding(&self) -> usize {
        self.window / 2
    }
}

/// 1-D convolution over the token axis with "same" zero padding.
///
/// Weights are laid out `[window, input_dim, filters]`; bias is `[filters]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalConv {
    pub spec: ConvSpec,
    pub weights: Parameter,
    pub bias: Parameter,
}

impl TemporalConv {
    pub fn new(spec: ConvSpec, rng: &mut SeededRng) -> Self {
        let ConvSpec {
            window: w,
            filters: f,
            input_dim: d,
        } = spec;
        let weights = glorot_uniform(&[w, d, f], w * d, w * f, rng);
        TemporalConv {
            spec,
            weights: Parameter::new(weights, true),
            bias: Parameter::new(Tensor::zeros(&[f]), true),
        }
    }

    pub fn from_parts(spec: ConvSpec, weights: Parameter, bias: Parameter) -> Result<Self> {
        let expected = [spec.window, spec.input_dim, spec.filters];
        if weights.shape() != expected {
            return Err(Error::shape(
                format!("conv(w={})", spec.window),
                format!("weights {:?}, expected {expected:?}", weights.shape()),
            ));
        }
        if bias.shape() != [spec.filters] {
            return Err(Error::shape(
                format!("conv(w={})", spec.window),
                format!("bias {:?}, expected [{}]", bias.shape(), spec.filters),
            ));
        }
        Ok(TemporalConv {
            spec,
            weights,
            bias,
        })
    }

    fn check_input(&self, input: &Tensor) -> Result<()> {
        if input.shape().len() != 2 || input.shape()[1] != self.spec.input_dim {
            return Err(Error::shape(
                format!("conv(w={})", self.spec.window),
                format!(
                    "input {:?}, expected [L, {}]",
                    input.shape(),
                    self.spec.input_dim
                ),
            ));
        }
        Ok(())
    }

    /// Input row feeding window offset `j` at output position `t`, if inside the sequence.
    #[inline]
    fn source_row(&self, t: usize, j: usize, len: usize) -> Option<usize> {
        let r = (t + j).checked_sub(self.spec.left_padding())?;
        (r < len).then_some(r)
    }

    /// `out[t][f] = bias[f] + sum_j sum_k padded[t + j][k] * weights[j][k][f]`
    pub fn forward(&self, input: &Tensor) -> Result<Tensor> {
        self.check_input(input)?;
        let len = input.rows();
        let (d, nf) = (self.spec.input_dim, self.spec.filters);
        let w = self.weights.value.data();
        let mut out = Tensor::zeros(&[len, nf]);
        for t in 0..len {
            let acc = out.row_mut(t);
            acc.copy_from_slice(self.bias.value.data());
            for j in 0..self.spec.window {
                let Some(r) = self.source_row(t, j, len) else {
                    continue;
                };
                let x = input.row(r);
                let slab = &w[j * d * nf..(j + 1) * d * nf];
                for (k, &xk) in x.iter().enumerate() {
                    let wk = &slab[k * nf..(k + 1) * nf];
                    for (a, &wv) in acc.iter_mut().zip(wk) {
                        *a += xk * wv;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Accumulates weight and bias gradients and returns the gradient w.r.t. `input`.
    pub fn backward(&mut self, input: &Tensor, grad_out: &Tensor) -> Tensor {
        let len = input.rows();
        let (d, nf) = (self.spec.input_dim, self.spec.filters);
        debug_assert_eq!(grad_out.shape(), [len, nf]);
        let mut grad_in = Tensor::zeros(input.shape());

        if self.bias.trainable {
            let gb = self.bias.grad.data_mut();
            for t in 0..len {
                for (acc, &g) in gb.iter_mut().zip(grad_out.row(t)) {
                    *acc += g;
                }
            }
        }

        let train_w = self.weights.trainable;
        for t in 0..len {
            let g = grad_out.row(t);
            for j in 0..self.spec.window {
                let Some(r) = self.source_row(t, j, len) else {
                    continue;
                };
                let base = j * d * nf;
                if train_w {
                    let x = input.row(r);
                    let gw = &mut self.weights.grad.data_mut()[base..base + d * nf];
                    for (k, &xk) in x.iter().enumerate() {
                        for (acc, &gv) in gw[k * nf..(k + 1) * nf].iter_mut().zip(g) {
                            *acc += xk * gv;
                        }
                    }
                }
                let w = &self.weights.value.data()[base..base + d * nf];
                let gi = grad_in.row_mut(r);
                for (k, acc) in gi.iter_mut().enumerate() {
                    let wk = &w[k * nf..(k + 1) * nf];
                    *acc += wk.iter().zip(g).map(|(a, b)| a * b).sum::<f64>();
                }
            }
        }
        grad_in
    }
}
