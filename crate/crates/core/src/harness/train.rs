use crate::corpus::ContextSource;
use crate::error::{Error, Result};
use crate::harness::data::{gold_contexts, Encoder};
use crate::harness::early_stop::{run_with_early_stopping, EpochRunner, TrainRecord};
use crate::harness::evaluate::evaluate;
use crate::model::{Example, Model, ModelBundle, ModelConfig};
use crate::nn::optim::Optimizer;
use crate::nn::param::Parameter;
use crate::nn::rng::{streams, SeededRng};
use crate::nn::tensor::Tensor;
use crate::textprep::EncodedSegment;

struct Trainer<'a> {
    model: Model,
    optimizer: Optimizer,
    train: &'a [EncodedSegment],
    contexts: Vec<Tensor>,
    validation: &'a [EncodedSegment],
    order: Vec<usize>,
    shuffle: SeededRng,
    dropout: SeededRng,
}

impl EpochRunner for Trainer<'_> {
    type Snapshot = (Model, Optimizer);

    fn train_epoch(&mut self, _epoch: usize) -> Result<f64> {
        self.shuffle.shuffle(&mut self.order);
        let batch_size = self.model.config().training.batch_size;
        let use_context = self.model.config().use_context;
        let mut total = 0.0;
        for chunk in self.order.chunks(batch_size) {
            let batch: Vec<Example> = chunk
                .iter()
                .map(|&i| Example {
                    segment: &self.train[i],
                    context: use_context.then(|| &self.contexts[i]),
                })
                .collect();
            let loss = self
                .model
                .loss_and_backward(&batch, Some(&mut self.dropout))?;
            total += loss * chunk.len() as f64;
            let mut params: Vec<&mut Parameter> = self
                .model
                .parameters_mut()
                .into_iter()
                .map(|(_, p)| p)
                .collect();
            self.optimizer.step(&mut params)?;
        }
        Ok(total / self.train.len() as f64)
    }

    fn validate(&mut self) -> Result<f64> {
        Ok(evaluate(&self.model, self.validation, ContextSource::Gold)?.accuracy())
    }

    fn snapshot(&self) -> Self::Snapshot {
        (self.model.clone(), self.optimizer.clone())
    }

    fn restore(&mut self, snapshot: Self::Snapshot) {
        (self.model, self.optimizer) = snapshot;
    }
}

/// Trains a fresh model from `config` (its seed drives initialisation,
/// batch order and dropout) with early stopping on validation accuracy.
/// Validation uses gold context. The returned model holds the parameters of
/// the best epoch.
pub fn train(
    config: &ModelConfig,
    encoder: &Encoder,
    train: &[EncodedSegment],
    validation: &[EncodedSegment],
    pretrained: Option<Tensor>,
) -> Result<(Model, TrainRecord)> {
    if train.is_empty() || validation.is_empty() {
        return Err(Error::Corpus(
            "training and validation splits must be non-empty".into(),
        ));
    }
    let mut model = Model::build(config, encoder.vocab_sizes(), pretrained)?;
    model.zero_grad();
    let contexts = if config.use_context {
        gold_contexts(train, config.n_prev, config.label_count)
    } else {
        Vec::new()
    };
    let mut trainer = Trainer {
        model,
        optimizer: Optimizer::new(config.training.optimizer),
        train,
        contexts,
        validation,
        order: (0..train.len()).collect(),
        shuffle: SeededRng::stream(config.seed, streams::SHUFFLE),
        dropout: SeededRng::stream(config.seed, streams::DROPOUT),
    };
    let record = run_with_early_stopping(
        &mut trainer,
        config.training.patience,
        config.training.max_epochs,
    )?;
    if let Some(reason) = &record.aborted {
        log::warn!("seed {}: training aborted at {reason}", config.seed);
    }
    Ok((trainer.model, record))
}

/// Packages a trained model with its encoder for checkpointing.
pub fn bundle(model: Model, encoder: Encoder) -> ModelBundle {
    ModelBundle {
        model,
        char_vocab: encoder.char_vocab,
        word_vocab: encoder.word_vocab,
        labels: encoder.labels,
        flags: encoder.flags,
        pad: encoder.pad,
    }
}
