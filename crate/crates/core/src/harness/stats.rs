/// Accuracy across repeated runs. `std` is the population deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunStatistics {
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// Runs left out because they aborted.
    pub excluded: usize,
}

impl RunStatistics {
    /// Mean and deviation are NaN when no run survived.
    pub fn from_accuracies(accuracies: Vec<f64>, excluded: usize) -> Self {
        let n = accuracies.len() as f64;
        let mean = accuracies.iter().sum::<f64>() / n;
        let std = (accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n).sqrt();
        RunStatistics {
            accuracies,
            mean,
            std,
            excluded,
        }
    }

    pub fn runs(&self) -> usize {
        self.accuracies.len()
    }
}
