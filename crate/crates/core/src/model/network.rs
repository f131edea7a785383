use crate::error::{Error, Result};
use crate::model::config::ModelConfig;
use crate::nn::conv::{ConvSpec, TemporalConv};
use crate::nn::dense::{Activation, Dense, DenseOutput};
use crate::nn::embedding::Embedding;
use crate::nn::gradcheck::Objective;
use crate::nn::loss::{argmax, softmax, softmax_cross_entropy_grad};
use crate::nn::param::Parameter;
use crate::nn::pool::{max_over_time, max_over_time_backward};
use crate::nn::rng::{streams, SeededRng};
use crate::nn::tensor::Tensor;
use crate::textprep::{EncodedSegment, TokenKind, PAD};

/// Embedding table and parallel convolutions for one tokenisation.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub kind: TokenKind,
    pub embedding: Embedding,
    pub convs: Vec<TemporalConv>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VocabSizes {
    pub chars: usize,
    pub words: usize,
}

/// A segment with its (optional) context features; the gold label is
/// `segment.label`.
#[derive(Clone, Copy, Debug)]
pub struct Example<'a> {
    pub segment: &'a EncodedSegment,
    pub context: Option<&'a Tensor>,
}

struct BranchTrace {
    indices: Vec<usize>,
    embedded: Tensor,
    argmax: Vec<Vec<usize>>,
}

struct Trace {
    branches: Vec<BranchTrace>,
    dropout_mask: Option<Vec<f64>>,
    reduction_input: Tensor,
    reduced: DenseOutput,
    logits: DenseOutput,
    probabilities: Tensor,
}

/// Convolutional classifier with one or two branches.
///
/// Per branch: embed, run each convolution with "same" padding, max-pool over
/// the valid positions. The pooled vectors of all branches are concatenated,
/// the context vector (if enabled) appended, then a ReLU reduction layer and a
/// softmax output layer follow.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    config: ModelConfig,
    branches: Vec<Branch>,
    reduction: Dense,
    output: Dense,
}

impl Model {
    /// Initialises all parameters from `config.seed`. `pretrained` is the word
    /// embedding table, required exactly when the word branch uses a
    /// pre-trained mode.
    pub fn build(
        config: &ModelConfig,
        vocab: VocabSizes,
        pretrained: Option<Tensor>,
    ) -> Result<Self> {
        config.validate()?;
        let mut rng = SeededRng::stream(config.seed, streams::INIT);
        let mut pretrained = pretrained;
        let mut branches = Vec::new();
        for (kind, bc) in config.branches() {
            let vocab_len = match kind {
                TokenKind::Character => vocab.chars,
                TokenKind::Word => vocab.words,
            };
            let embedding = if bc.embedding_mode.is_pretrained() {
                let mut table = pretrained.take().ok_or_else(|| {
                    Error::Config(format!(
                        "{} branch: {:?} needs a pre-trained embedding table",
                        kind.name(),
                        bc.embedding_mode
                    ))
                })?;
                if table.shape() != [vocab_len, bc.embedding_dim] {
                    return Err(Error::shape(
                        format!("{}.embedding", kind.name()),
                        format!(
                            "pre-trained table {:?}, expected [{vocab_len}, {}]",
                            table.shape(),
                            bc.embedding_dim
                        ),
                    ));
                }
                table.row_mut(PAD).fill(0.0);
                let param = Parameter::new(table, bc.embedding_mode.is_trainable())
                    .with_pinned_rows(&[PAD]);
                Embedding::new(param)?
            } else {
                Embedding::random(vocab_len, bc.embedding_dim, true, Some(PAD), &mut rng)
            };
            let convs = bc
                .window_sizes
                .iter()
                .map(|&w| {
                    Ok(TemporalConv::new(
                        ConvSpec::new(w, bc.filters_per_window, bc.embedding_dim)?,
                        &mut rng,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            branches.push(Branch {
                kind,
                embedding,
                convs,
            });
        }
        if pretrained.is_some() {
            return Err(Error::Config(
                "a pre-trained table was supplied but no branch uses one".into(),
            ));
        }
        let reduction = Dense::new(
            config.reduction_input_dim(),
            config.reduction_dim,
            Activation::Relu,
            &mut rng,
        );
        let output = Dense::new(
            config.reduction_dim,
            config.label_count,
            Activation::None,
            &mut rng,
        );
        Ok(Model {
            config: config.clone(),
            branches,
            reduction,
            output,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn label_count(&self) -> usize {
        self.config.label_count
    }

    /// All parameters in a fixed order, with stable names.
    pub fn parameters_mut(&mut self) -> Vec<(String, &mut Parameter)> {
        let mut out = Vec::new();
        for b in &mut self.branches {
            let name = b.kind.name();
            out.push((format!("{name}.embedding"), &mut b.embedding.table));
            for conv in &mut b.convs {
                let w = conv.spec.window;
                out.push((format!("{name}.conv{w}.weights"), &mut conv.weights));
                out.push((format!("{name}.conv{w}.bias"), &mut conv.bias));
            }
        }
        out.push(("reduction.weights".into(), &mut self.reduction.weights));
        out.push(("reduction.bias".into(), &mut self.reduction.bias));
        out.push(("output.weights".into(), &mut self.output.weights));
        out.push(("output.bias".into(), &mut self.output.bias));
        out
    }

    pub fn parameters(&self) -> Vec<(String, &Parameter)> {
        let mut out = Vec::new();
        for b in &self.branches {
            let name = b.kind.name();
            out.push((format!("{name}.embedding"), &b.embedding.table));
            for conv in &b.convs {
                let w = conv.spec.window;
                out.push((format!("{name}.conv{w}.weights"), &conv.weights));
                out.push((format!("{name}.conv{w}.bias"), &conv.bias));
            }
        }
        out.push(("reduction.weights".into(), &self.reduction.weights));
        out.push(("reduction.bias".into(), &self.reduction.bias));
        out.push(("output.weights".into(), &self.output.weights));
        out.push(("output.bias".into(), &self.output.bias));
        out
    }

    pub fn zero_grad(&mut self) {
        for (_, p) in self.parameters_mut() {
            p.zero_grad();
        }
    }

    fn trace(
        &self,
        segment: &EncodedSegment,
        context: Option<&Tensor>,
        dropout: Option<&mut SeededRng>,
    ) -> Result<Trace> {
        let mut pooled = Vec::new();
        let mut branches = Vec::with_capacity(self.branches.len());
        for b in &self.branches {
            let seq = segment.sequence(b.kind);
            if seq.valid_length == 0 || seq.valid_length > seq.indices.len() {
                return Err(Error::EmptySegment(format!(
                    "({}, {}) has {} valid {} tokens",
                    segment.dialog_id,
                    segment.position,
                    seq.valid_length,
                    b.kind.name()
                )));
            }
            // Padding rows embed to zero, exactly like the convolution's own
            // zero padding, so only the valid prefix is materialised.
            let indices = seq.indices[..seq.valid_length].to_vec();
            let embedded = b.embedding.forward(&indices)?;
            let mut argmax = Vec::with_capacity(b.convs.len());
            for conv in &b.convs {
                let activations = conv.forward(&embedded)?;
                let p = max_over_time(&activations, seq.valid_length)?;
                pooled.push(p.values);
                argmax.push(p.argmax);
            }
            branches.push(BranchTrace {
                indices,
                embedded,
                argmax,
            });
        }
        let mut representation = Tensor::concat(&pooled.iter().collect::<Vec<_>>());

        let rate = self.config.dropout;
        let dropout_mask = match dropout {
            Some(rng) if rate > 0.0 => {
                let keep = 1.0 / (1.0 - rate);
                let mask: Vec<f64> = (0..representation.len())
                    .map(|_| if rng.next_f64() < rate { 0.0 } else { keep })
                    .collect();
                for (x, m) in representation.data_mut().iter_mut().zip(&mask) {
                    *x *= m;
                }
                Some(mask)
            }
            _ => None,
        };

        let reduction_input = if self.config.use_context {
            let ctx = context
                .ok_or_else(|| Error::Config("model uses context but none was given".into()))?;
            if ctx.len() != self.config.context_dim() {
                return Err(Error::shape(
                    "context",
                    format!(
                        "got {} features, expected {}",
                        ctx.len(),
                        self.config.context_dim()
                    ),
                ));
            }
            Tensor::concat(&[&representation, ctx])
        } else {
            representation
        };
        let reduced = self.reduction.forward(&reduction_input)?;
        let logits = self.output.forward(&reduced.output)?;
        let probabilities = softmax(&logits.output);
        Ok(Trace {
            branches,
            dropout_mask,
            reduction_input,
            reduced,
            logits,
            probabilities,
        })
    }

    /// Label distribution for one segment. `context` is ignored unless the
    /// model uses context, in which case it is required.
    pub fn forward(&self, segment: &EncodedSegment, context: Option<&Tensor>) -> Result<Tensor> {
        Ok(self.trace(segment, context, None)?.probabilities)
    }

    /// Most probable label; the lowest index wins ties.
    pub fn predict(&self, segment: &EncodedSegment, context: Option<&Tensor>) -> Result<usize> {
        Ok(argmax(self.forward(segment, context)?.data()))
    }

    fn backward(&mut self, trace: &Trace, grad_logits: &Tensor) {
        let g_reduced = self
            .output
            .backward(&trace.reduced.output, &trace.logits, grad_logits);
        let g_input = self
            .reduction
            .backward(&trace.reduction_input, &trace.reduced, &g_reduced);
        let rep_dim = self.config.representation_dim();
        let mut g_rep = g_input.data()[..rep_dim].to_vec();
        if let Some(mask) = &trace.dropout_mask {
            for (g, m) in g_rep.iter_mut().zip(mask) {
                *g *= m;
            }
        }
        let mut offset = 0;
        for (branch, bt) in self.branches.iter_mut().zip(&trace.branches) {
            let rows = bt.embedded.rows();
            let mut g_embedded = Tensor::zeros(bt.embedded.shape());
            for (conv, argmax) in branch.convs.iter_mut().zip(&bt.argmax) {
                let f = conv.spec.filters;
                let g_pooled = Tensor::vector(&g_rep[offset..offset + f]);
                offset += f;
                let g_act = max_over_time_backward(argmax, &g_pooled, rows);
                let g_in = conv.backward(&bt.embedded, &g_act);
                for (acc, g) in g_embedded.data_mut().iter_mut().zip(g_in.data()) {
                    *acc += g;
                }
            }
            branch.embedding.backward(&bt.indices, &g_embedded);
        }
    }

    fn example_loss(trace: &Trace, gold: usize) -> f64 {
        // log-sum-exp form of -ln softmax(z)[gold]
        let z = trace.logits.output.data();
        let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        lse - z[gold]
    }

    /// Mean cross-entropy over `batch` without touching gradients.
    pub fn batch_loss(&self, batch: &[Example<'_>]) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::Config("empty batch".into()));
        }
        let mut total = 0.0;
        for ex in batch {
            let trace = self.trace(ex.segment, ex.context, None)?;
            total += Self::example_loss(&trace, ex.segment.label);
        }
        Ok(total / batch.len() as f64)
    }

    /// Mean cross-entropy over `batch`; gradients of the mean are accumulated
    /// into every trainable parameter. `dropout` supplies the mask draws when
    /// the model has a dropout rate.
    pub fn loss_and_backward(
        &mut self,
        batch: &[Example<'_>],
        mut dropout: Option<&mut SeededRng>,
    ) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::Config("empty batch".into()));
        }
        let scale = 1.0 / batch.len() as f64;
        let mut total = 0.0;
        for ex in batch {
            let gold = ex.segment.label;
            if gold >= self.label_count() {
                return Err(Error::IndexOutOfRange {
                    index: gold,
                    size: self.label_count(),
                });
            }
            let trace = self.trace(ex.segment, ex.context, dropout.as_deref_mut())?;
            let loss = Self::example_loss(&trace, gold);
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!(
                    "loss for segment ({}, {})",
                    ex.segment.dialog_id, ex.segment.position
                )));
            }
            total += loss;
            let grad = softmax_cross_entropy_grad(&trace.probabilities, gold, scale);
            self.backward(&trace, &grad);
        }
        Ok(total * scale)
    }
}

/// A model bound to a fixed batch, for gradient checking.
pub struct BatchObjective<'a> {
    pub model: &'a mut Model,
    pub batch: Vec<Example<'a>>,
}

impl Objective for BatchObjective<'_> {
    fn parameters_mut(&mut self) -> Vec<(String, &mut Parameter)> {
        self.model.parameters_mut()
    }

    fn loss(&mut self, backward: bool) -> Result<f64> {
        if backward {
            self.model.loss_and_backward(&self.batch, None)
        } else {
            self.model.batch_loss(&self.batch)
        }
    }
}
