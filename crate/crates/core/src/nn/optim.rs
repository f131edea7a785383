use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::param::Parameter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRule {
    /// Adaptive moment estimation with bias correction.
    Adam,
    /// Plain gradient descent.
    Sgd,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub rule: UpdateRule,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            rule: UpdateRule::Adam,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl OptimizerConfig {
    pub fn sgd(learning_rate: f64) -> Self {
        OptimizerConfig {
            rule: UpdateRule::Sgd,
            learning_rate,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0;
        if !ok {
            return Err(Error::Config(format!(
                "invalid optimizer settings {self:?}"
            )));
        }
        Ok(())
    }
}

/// Applies parameter updates and zeroes gradients afterwards.
///
/// Moment buffers are matched to parameters by position, so callers must pass
/// the same parameters in the same order on every step.
#[derive(Clone, Debug)]
pub struct Optimizer {
    config: OptimizerConfig,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
    steps: u64,
}

impl Optimizer {
    pub fn new(config: OptimizerConfig) -> Self {
        Optimizer {
            config,
            first_moment: Vec::new(),
            second_moment: Vec::new(),
            steps: 0,
        }
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn step(&mut self, params: &mut [&mut Parameter]) -> Result<()> {
        for (i, p) in params.iter().enumerate() {
            if !p.grad.is_finite() {
                return Err(Error::NonFinite(format!(
                    "gradient of parameter #{i} (shape {:?})",
                    p.shape()
                )));
            }
        }
        if self.first_moment.is_empty() {
            self.first_moment = params.iter().map(|p| vec![0.0; p.value.len()]).collect();
            self.second_moment = self.first_moment.clone();
        }
        if self.first_moment.len() != params.len() {
            return Err(Error::Config(
                "optimizer parameter list changed between steps".into(),
            ));
        }
        self.steps += 1;
        let c = self.config;
        let t = self.steps as i32;
        let correction1 = 1.0 - c.beta1.powi(t);
        let correction2 = 1.0 - c.beta2.powi(t);

        for (i, p) in params.iter_mut().enumerate() {
            if p.trainable {
                let row_len = p.value.row_len();
                let pinned = p.pinned_rows().to_vec();
                let Parameter { value, grad, .. } = &mut **p;
                let (m, v) = (&mut self.first_moment[i], &mut self.second_moment[i]);
                for (idx, (x, &g)) in value.data_mut().iter_mut().zip(grad.data()).enumerate() {
                    if !p_row_free(&pinned, idx / row_len) {
                        continue;
                    }
                    match c.rule {
                        UpdateRule::Sgd => *x -= c.learning_rate * g,
                        UpdateRule::Adam => {
                            m[idx] = c.beta1 * m[idx] + (1.0 - c.beta1) * g;
                            v[idx] = c.beta2 * v[idx] + (1.0 - c.beta2) * g * g;
                            let m_hat = m[idx] / correction1;
                            let v_hat = v[idx] / correction2;
                            *x -= c.learning_rate * m_hat / (v_hat.sqrt() + c.epsilon);
                        }
                    }
                }
            }
            p.zero_grad();
        }
        Ok(())
    }
}

fn p_row_free(pinned: &[usize], row: usize) -> bool {
    pinned.binary_search(&row).is_err()
}
