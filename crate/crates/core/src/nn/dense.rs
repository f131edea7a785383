use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::init::glorot_uniform;
use crate::nn::loss::softmax;
use crate::nn::param::Parameter;
use crate::nn::rng::SeededRng;
use crate::nn::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    None,
    Relu,
    Softmax,
}

/// Affine map `[n] -> [m]` with weights `[n, m]`, followed by an activation.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub weights: Parameter,
    pub bias: Parameter,
    pub activation: Activation,
}

/// Values kept from the forward pass for the backward pass.
#[derive(Clone, Debug)]
pub struct DenseOutput {
    pub pre_activation: Tensor,
    pub output: Tensor,
}

impl Dense {
    pub fn new(inputs: usize, outputs: usize, activation: Activation, rng: &mut SeededRng) -> Self {
        let w = glorot_uniform(&[inputs, outputs], inputs, outputs, rng);
        Dense {
            weights: Parameter::new(w, true),
            bias: Parameter::new(Tensor::zeros(&[outputs]), true),
            activation,
        }
    }

    pub fn from_parts(weights: Parameter, bias: Parameter, activation: Activation) -> Result<Self> {
        let ws = weights.shape();
        if ws.len() != 2 || bias.shape() != [ws[1]] {
            return Err(Error::shape(
                "dense",
                format!("weights {:?} incompatible with bias {:?}", ws, bias.shape()),
            ));
        }
        Ok(Dense {
            weights,
            bias,
            activation,
        })
    }

    pub fn inputs(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn outputs(&self) -> usize {
        self.weights.shape()[1]
    }

    pub fn forward(&self, input: &Tensor) -> Result<DenseOutput> {
        let (n, m) = (self.inputs(), self.outputs());
        if input.shape() != [n] {
            return Err(Error::shape(
                "dense",
                format!("input {:?}, expected [{n}]", input.shape()),
            ));
        }
        let mut z = self.bias.value.data().to_vec();
        let w = self.weights.value.data();
        for (i, &x) in input.data().iter().enumerate() {
            for (acc, &wv) in z.iter_mut().zip(&w[i * m..(i + 1) * m]) {
                *acc += x * wv;
            }
        }
        let pre_activation = Tensor::vector(&z);
        let output = match self.activation {
            Activation::None => pre_activation.clone(),
            Activation::Relu => Tensor::vector(&z.iter().map(|&v| v.max(0.0)).collect::<Vec<_>>()),
            Activation::Softmax => softmax(&pre_activation),
        };
        Ok(DenseOutput {
            pre_activation,
            output,
        })
    }

    /// Gradient of the pre-activation given the gradient of the output.
    fn activation_backward(&self, cached: &DenseOutput, grad_out: &Tensor) -> Vec<f64> {
        let g = grad_out.data();
        match self.activation {
            Activation::None => g.to_vec(),
            Activation::Relu => cached
                .pre_activation
                .data()
                .iter()
                .zip(g)
                .map(|(&z, &gv)| if z > 0.0 { gv } else { 0.0 })
                .collect(),
            Activation::Softmax => {
                let p = cached.output.data();
                let dot: f64 = p.iter().zip(g).map(|(a, b)| a * b).sum();
                p.iter().zip(g).map(|(&pv, &gv)| pv * (gv - dot)).collect()
            }
        }
    }

    /// Accumulates parameter gradients and returns the gradient w.r.t. `input`.
    pub fn backward(&mut self, input: &Tensor, cached: &DenseOutput, grad_out: &Tensor) -> Tensor {
        let gz = self.activation_backward(cached, grad_out);
        self.backward_pre_activation(input, &gz)
    }

    /// Backward pass starting from the gradient of the pre-activation.
    pub fn backward_pre_activation(&mut self, input: &Tensor, gz: &[f64]) -> Tensor {
        let m = self.outputs();
        if self.bias.trainable {
            for (acc, &g) in self.bias.grad.data_mut().iter_mut().zip(gz) {
                *acc += g;
            }
        }
        if self.weights.trainable {
            let gw = self.weights.grad.data_mut();
            for (i, &x) in input.data().iter().enumerate() {
                for (acc, &g) in gw[i * m..(i + 1) * m].iter_mut().zip(gz) {
                    *acc += x * g;
                }
            }
        }
        let w = self.weights.value.data();
        let grad_in: Vec<f64> = (0..self.inputs())
            .map(|i| {
                w[i * m..(i + 1) * m]
                    .iter()
                    .zip(gz)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        Tensor::vector(&grad_in)
    }
}
