//! Patience-based early stopping with best-epoch restore.

use crate::error::Result;

/// Tracks validation accuracy across epochs. Only a strict improvement
/// resets the patience counter.
#[derive(Clone, Debug)]
pub struct EarlyStopping {
    patience: usize,
    best: Option<f64>,
    best_epoch: usize,
    epoch: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// New best; the caller should snapshot parameters.
    Improved,
    Continue,
    Stop,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping {
            patience,
            best: None,
            best_epoch: 0,
            epoch: 0,
        }
    }

    /// Records the next epoch's validation accuracy.
    pub fn observe(&mut self, accuracy: f64) -> Verdict {
        self.epoch += 1;
        if self.best.is_none_or(|b| accuracy > b) {
            self.best = Some(accuracy);
            self.best_epoch = self.epoch;
            Verdict::Improved
        } else if self.epoch - self.best_epoch >= self.patience {
            Verdict::Stop
        } else {
            Verdict::Continue
        }
    }

    /// 1-based epoch of the best accuracy so far, 0 before any observation.
    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }

    pub fn best(&self) -> Option<f64> {
        self.best
    }

    pub fn epochs_seen(&self) -> usize {
        self.epoch
    }
}

/// Per-run training history.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainRecord {
    /// Mean training loss of each completed epoch.
    pub train_loss: Vec<f64>,
    pub validation_accuracy: Vec<f64>,
    /// 1-based; the returned parameters are the ones from this epoch.
    pub best_epoch: usize,
    pub stop_epoch: usize,
    /// Set when a non-finite value ended the run.
    pub aborted: Option<String>,
}

/// A model under training, seen by the early-stopping driver.
pub trait EpochRunner {
    type Snapshot;
    /// Runs one training epoch (1-based) and returns its mean loss.
    fn train_epoch(&mut self, epoch: usize) -> Result<f64>;
    fn validate(&mut self) -> Result<f64>;
    fn snapshot(&self) -> Self::Snapshot;
    fn restore(&mut self, snapshot: Self::Snapshot);
}

/// Trains until patience runs out or `max_epochs` is reached, then restores
/// the best snapshot. A `NonFinite` error ends the run and is recorded;
/// other errors propagate.
pub fn run_with_early_stopping<R: EpochRunner>(
    runner: &mut R,
    patience: usize,
    max_epochs: usize,
) -> Result<TrainRecord> {
    let mut stopper = EarlyStopping::new(patience);
    let mut record = TrainRecord::default();
    let mut best = runner.snapshot();
    for epoch in 1..=max_epochs {
        let step = runner
            .train_epoch(epoch)
            .and_then(|loss| Ok((loss, runner.validate()?)));
        let (loss, accuracy) = match step {
            Ok(v) => v,
            Err(crate::Error::NonFinite(msg)) => {
                record.aborted = Some(format!("epoch {epoch}: {msg}"));
                record.stop_epoch = epoch;
                break;
            }
            Err(e) => return Err(e),
        };
        record.train_loss.push(loss);
        record.validation_accuracy.push(accuracy);
        record.stop_epoch = epoch;
        match stopper.observe(accuracy) {
            Verdict::Improved => best = runner.snapshot(),
            Verdict::Continue => {}
            Verdict::Stop => break,
        }
    }
    record.best_epoch = stopper.best_epoch();
    runner.restore(best);
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    /// Replays a fixed accuracy trajectory; the "parameters" are the epoch.
    struct Replay {
        accuracies: Vec<f64>,
        epoch: usize,
        fail_at: Option<usize>,
    }

    impl EpochRunner for Replay {
        type Snapshot = usize;
        fn train_epoch(&mut self, epoch: usize) -> Result<f64> {
            self.epoch = epoch;
            if self.fail_at == Some(epoch) {
                return Err(Error::NonFinite("loss is NaN".into()));
            }
            Ok(1.0 / epoch as f64)
        }
        fn validate(&mut self) -> Result<f64> {
            Ok(self.accuracies[self.epoch - 1])
        }
        fn snapshot(&self) -> usize {
            self.epoch
        }
        fn restore(&mut self, s: usize) {
            self.epoch = s;
        }
    }

    fn replay(accuracies: Vec<f64>) -> Replay {
        Replay {
            accuracies,
            epoch: 0,
            fail_at: None,
        }
    }

    #[test]
    fn plateau_stops_patience_epochs_after_best() {
        let mut acc = vec![0.5];
        acc.extend(std::iter::repeat_n(0.6, 30));
        let mut r = replay(acc);
        let rec = run_with_early_stopping(&mut r, 10, 100).unwrap();
        assert_eq!((rec.best_epoch, rec.stop_epoch), (2, 12));
        assert_eq!(r.epoch, 2);
        assert_eq!(rec.validation_accuracy.len(), 12);
    }

    #[test]
    fn increasing_accuracy_hits_the_cap() {
        let mut r = replay((0..20).map(|i| i as f64 / 20.0).collect());
        let rec = run_with_early_stopping(&mut r, 10, 15).unwrap();
        assert_eq!((rec.best_epoch, rec.stop_epoch), (15, 15));
        assert_eq!(r.epoch, 15);
    }

    #[test]
    fn ties_do_not_reset_patience() {
        let mut r = replay(vec![0.7, 0.7, 0.7, 0.7]);
        let rec = run_with_early_stopping(&mut r, 2, 10).unwrap();
        assert_eq!((rec.best_epoch, rec.stop_epoch), (1, 3));
    }

    #[test]
    fn non_finite_loss_is_recorded() {
        let mut r = replay(vec![0.3, 0.5, 0.4, 0.9]);
        r.fail_at = Some(3);
        let rec = run_with_early_stopping(&mut r, 10, 10).unwrap();
        assert!(rec.aborted.as_deref().unwrap().contains("epoch 3"));
        assert_eq!((rec.best_epoch, rec.stop_epoch), (2, 3));
        assert_eq!(r.epoch, 2);
    }
}
