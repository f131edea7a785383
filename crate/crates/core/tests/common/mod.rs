#![allow(dead_code)]

use dialact_core::corpus::ContextSource;
use dialact_core::corpus::{LabelSet, Segment};
use dialact_core::harness::{evaluate, train, Encoder, Evaluation, TrainRecord};
use dialact_core::model::{Model, ModelConfig};
use dialact_core::nn::gradcheck::{gradient_check, GradCheckReport, Objective, DEFAULT_STEP};
use dialact_core::nn::{
    cross_entropy, max_over_time, max_over_time_backward, softmax, softmax_cross_entropy_grad,
    Activation, ConvSpec, Dense, Embedding, Parameter, SeededRng, TemporalConv, Tensor,
};
use dialact_core::textprep::PreprocessingFlags;
use dialact_core::Result;

/// Direct sliding-window convolution with "same" padding.
pub fn naive_conv(x: &Tensor, w: &Tensor, b: &Tensor) -> Vec<f64> {
    let (len, dim) = (x.shape()[0], x.shape()[1]);
    let (window, filters) = (w.shape()[0], w.shape()[2]);
    let left = window / 2;
    let mut out = vec![0.0; len * filters];
    for t in 0..len {
        for f in 0..filters {
            let mut acc = b.data()[f];
            for j in 0..window {
                let src = t as isize + j as isize - left as isize;
                if src < 0 || src >= len as isize {
                    continue;
                }
                for c in 0..dim {
                    acc += w.data()[(j * dim + c) * filters + f] * x.data()[src as usize * dim + c];
                }
            }
            out[t * filters + f] = acc;
        }
    }
    out
}

fn dot(a: &Tensor, b: &Tensor) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

/// Linear readout `Σ out ⊙ r`, whose gradient with respect to `out` is `r`.
struct ConvObjective {
    conv: TemporalConv,
    input: Parameter,
    readout: Tensor,
}

impl Objective for ConvObjective {
    fn parameters_mut(&mut self) -> Vec<(String, &mut Parameter)> {
        vec![
            ("weights".into(), &mut self.conv.weights),
            ("bias".into(), &mut self.conv.bias),
            ("input".into(), &mut self.input),
        ]
    }

    fn loss(&mut self, backward: bool) -> Result<f64> {
        let out = self.conv.forward(&self.input.value)?;
        if backward {
            let gi = self.conv.backward(&self.input.value, &self.readout);
            for (g, d) in self.input.grad.data_mut().iter_mut().zip(gi.data()) {
                *g += d;
            }
        }
        Ok(dot(&out, &self.readout))
    }
}

struct EmbeddingObjective {
    embedding: Embedding,
    indices: Vec<usize>,
    readout: Tensor,
}

impl Objective for EmbeddingObjective {
    fn parameters_mut(&mut self) -> Vec<(String, &mut Parameter)> {
        vec![("table".into(), &mut self.embedding.table)]
    }

    fn loss(&mut self, backward: bool) -> Result<f64> {
        let out = self.embedding.forward(&self.indices)?;
        if backward {
            self.embedding.backward(&self.indices, &self.readout);
        }
        Ok(dot(&out, &self.readout))
    }
}

struct PoolObjective {
    input: Parameter,
    valid: usize,
    readout: Tensor,
}

impl Objective for PoolObjective {
    fn parameters_mut(&mut self) -> Vec<(String, &mut Parameter)> {
        vec![("input".into(), &mut self.input)]
    }

    fn loss(&mut self, backward: bool) -> Result<f64> {
        let pooled = max_over_time(&self.input.value, self.valid)?;
        if backward {
            let g = max_over_time_backward(&pooled.argmax, &self.readout, self.input.value.rows());
            for (a, b) in self.input.grad.data_mut().iter_mut().zip(g.data()) {
                *a += b;
            }
        }
        Ok(dot(&pooled.values, &self.readout))
    }
}

struct DenseObjective {
    dense: Dense,
    input: Parameter,
    readout: Tensor,
}

impl Objective for DenseObjective {
    fn parameters_mut(&mut self) -> Vec<(String, &mut Parameter)> {
        vec![
            ("weights".into(), &mut self.dense.weights),
            ("bias".into(), &mut self.dense.bias),
            ("input".into(), &mut self.input),
        ]
    }

    fn loss(&mut self, backward: bool) -> Result<f64> {
        let out = self.dense.forward(&self.input.value)?;
        if backward {
            let gi = self.dense.backward(&self.input.value, &out, &self.readout);
            for (a, b) in self.input.grad.data_mut().iter_mut().zip(gi.data()) {
                *a += b;
            }
        }
        Ok(dot(&out.output, &self.readout))
    }
}

struct SoftmaxLossObjective {
    logits: Parameter,
    gold: usize,
}

impl Objective for SoftmaxLossObjective {
    fn parameters_mut(&mut self) -> Vec<(String, &mut Parameter)> {
        vec![("logits".into(), &mut self.logits)]
    }

    fn loss(&mut self, backward: bool) -> Result<f64> {
        let p = softmax(&self.logits.value);
        if backward {
            let g = softmax_cross_entropy_grad(&p, self.gold, 1.0);
            for (a, b) in self.logits.grad.data_mut().iter_mut().zip(g.data()) {
                *a += b;
            }
        }
        Ok(cross_entropy(&p, self.gold))
    }
}

/// Gradient checks of every layer in isolation on seeded random inputs.
pub fn layer_checks(seed: u64, tolerance: f64) -> Result<Vec<(String, GradCheckReport)>> {
    let mut rng = SeededRng::new(seed);
    let mut out = Vec::new();
    let mut run = |name: String, obj: &mut dyn Objective| -> Result<()> {
        out.push((name, gradient_check(obj, DEFAULT_STEP, tolerance)?));
        Ok(())
    };

    let mut emb = EmbeddingObjective {
        embedding: Embedding::random(7, 4, true, Some(0), &mut rng),
        indices: vec![3, 0, 5, 3, 1, 6],
        readout: Tensor::uniform(&[6, 4], -1.0, 1.0, &mut rng),
    };
    run("embedding".into(), &mut emb)?;

    for window in [1, 2, 3, 4, 7] {
        let spec = ConvSpec::new(window, 3, 4)?;
        let mut conv = ConvObjective {
            conv: TemporalConv::new(spec, &mut rng),
            input: Parameter::new(Tensor::uniform(&[6, 4], -1.0, 1.0, &mut rng), true),
            readout: Tensor::uniform(&[6, 3], -1.0, 1.0, &mut rng),
        };
        run(format!("conv w={window}"), &mut conv)?;
    }

    // Distinct, well separated values keep the max away from ties.
    let mut values: Vec<f64> = (0..24).map(|i| i as f64 * 0.1).collect();
    rng.shuffle(&mut values);
    let mut pool = PoolObjective {
        input: Parameter::new(Tensor::from_vec(&[8, 3], values)?, true),
        valid: 5,
        readout: Tensor::uniform(&[3], -1.0, 1.0, &mut rng),
    };
    run("max_over_time".into(), &mut pool)?;

    for activation in [Activation::None, Activation::Relu, Activation::Softmax] {
        let mut dense = DenseObjective {
            dense: Dense::new(5, 4, activation, &mut rng),
            input: Parameter::new(Tensor::uniform(&[5], -1.0, 1.0, &mut rng), true),
            readout: Tensor::uniform(&[4], -1.0, 1.0, &mut rng),
        };
        run(format!("dense {activation:?}"), &mut dense)?;
    }

    let mut ce = SoftmaxLossObjective {
        logits: Parameter::new(Tensor::uniform(&[5], -2.0, 2.0, &mut rng), true),
        gold: 2,
    };
    run("softmax cross-entropy".into(), &mut ce)?;
    Ok(out)
}

pub struct Outcome {
    pub model: Model,
    pub record: TrainRecord,
    pub encoder: Encoder,
}

/// Fits an encoder on `train`, trains, and returns the model.
pub fn fit(
    config: &ModelConfig,
    flags: PreprocessingFlags,
    all: &[Segment],
    train_set: &[Segment],
    validation: &[Segment],
) -> Result<Outcome> {
    let labels = LabelSet::from_segments(all);
    let config = ModelConfig {
        label_count: labels.len(),
        ..config.clone()
    };
    let encoder = Encoder::fit(train_set, labels, flags, &config)?;
    let (tr, _) = encoder.encode_all(train_set)?;
    let (va, _) = encoder.encode_all(validation)?;
    let (model, record) = train(&config, &encoder, &tr, &va, None)?;
    Ok(Outcome {
        model,
        record,
        encoder,
    })
}

pub fn accuracy_on(
    outcome: &Outcome,
    segments: &[Segment],
    source: ContextSource,
) -> Result<Evaluation> {
    let (encoded, _) = outcome.encoder.encode_all(segments)?;
    evaluate(&outcome.model, &encoded, source)
}

/// Splits segments by dialog order into train/validation/test fractions.
pub fn split(
    segments: &[Segment],
    train: f64,
    validation: f64,
) -> (Vec<Segment>, Vec<Segment>, Vec<Segment>) {
    let ids = dialact_core::synthetic::dialog_ids(segments);
    let a = (ids.len() as f64 * train).round() as usize;
    let b = a + (ids.len() as f64 * validation).round() as usize;
    let part = |r: std::ops::Range<usize>| -> Vec<Segment> {
        let set: std::collections::HashSet<&String> = ids[r].iter().collect();
        segments
            .iter()
            .filter(|s| set.contains(&s.dialog_id))
            .cloned()
            .collect()
    };
    (part(0..a), part(a..b), part(b..ids.len()))
}
