//! Central finite-difference verification of analytic gradients.

use crate::error::Result;
use crate::nn::param::Parameter;

pub const DEFAULT_STEP: f64 = 1e-5;

/// Something with parameters and a scalar loss.
pub trait Objective {
    fn parameters_mut(&mut self) -> Vec<(String, &mut Parameter)>;

    /// Loss at the current parameter values. With `backward`, gradients are
    /// also accumulated into the parameters.
    fn loss(&mut self, backward: bool) -> Result<f64>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterCheck {
    pub name: String,
    pub trainable: bool,
    pub elements_checked: usize,
    pub max_relative_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    pub parameters: Vec<ParameterCheck>,
    pub tolerance: f64,
}

impl GradCheckReport {
    pub fn max_relative_error(&self) -> f64 {
        self.parameters
            .iter()
            .map(|p| p.max_relative_error)
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_relative_error() < self.tolerance
    }

    pub fn worst(&self) -> Option<&ParameterCheck> {
        self.parameters
            .iter()
            .max_by(|a, b| a.max_relative_error.total_cmp(&b.max_relative_error))
    }
}

/// `|a - n| / max(|a|, |n|, 1e-8)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Compares analytic gradients with central differences of step `step` for
/// every free element of every trainable parameter. Frozen parameters and
/// pinned rows are listed with zero elements checked.
pub fn gradient_check(
    objective: &mut dyn Objective,
    step: f64,
    tolerance: f64,
) -> Result<GradCheckReport> {
    gradient_check_sampled(objective, step, tolerance, None)
}

/// Like [`gradient_check`], but checks at most `limit` evenly spaced free
/// elements per parameter.
pub fn gradient_check_sampled(
    objective: &mut dyn Objective,
    step: f64,
    tolerance: f64,
    limit: Option<usize>,
) -> Result<GradCheckReport> {
    for (_, p) in objective.parameters_mut() {
        p.zero_grad();
    }
    objective.loss(true)?;
    let analytic: Vec<Vec<f64>> = objective
        .parameters_mut()
        .into_iter()
        .map(|(_, p)| p.grad.data().to_vec())
        .collect();

    let mut parameters = Vec::with_capacity(analytic.len());
    for (pi, grads) in analytic.iter().enumerate() {
        let (name, trainable, free): (String, bool, Vec<usize>) = {
            let mut params = objective.parameters_mut();
            let (name, p) = &mut params[pi];
            let free: Vec<usize> = (0..p.value.len())
                .filter(|&i| p.is_element_free(i))
                .collect();
            (name.clone(), p.trainable, subsample(free, limit))
        };
        let mut worst = 0.0f64;
        for &i in &free {
            let numeric = {
                let original = nudge(objective, pi, i, None);
                nudge(objective, pi, i, Some(original + step));
                let up = objective.loss(false)?;
                nudge(objective, pi, i, Some(original - step));
                let down = objective.loss(false)?;
                nudge(objective, pi, i, Some(original));
                (up - down) / (2.0 * step)
            };
            worst = worst.max(relative_error(grads[i], numeric));
        }
        parameters.push(ParameterCheck {
            name,
            trainable,
            elements_checked: free.len(),
            max_relative_error: worst,
        });
    }
    for (_, p) in objective.parameters_mut() {
        p.zero_grad();
    }
    Ok(GradCheckReport {
        parameters,
        tolerance,
    })
}

fn subsample(free: Vec<usize>, limit: Option<usize>) -> Vec<usize> {
    match limit {
        Some(k) if free.len() > k => (0..k).map(|j| free[j * free.len() / k]).collect(),
        _ => free,
    }
}

/// Reads element `i` of parameter `pi`, optionally overwriting it; returns the old value.
fn nudge(objective: &mut dyn Objective, pi: usize, i: usize, value: Option<f64>) -> f64 {
    let mut params = objective.parameters_mut();
    let slot = &mut params[pi].1.value.data_mut()[i];
    let old = *slot;
    if let Some(v) = value {
        *slot = v;
    }
    old
}
