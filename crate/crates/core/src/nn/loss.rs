use crate::nn::tensor::Tensor;

/// Numerically stable softmax of a 1-D tensor.
pub fn softmax(logits: &Tensor) -> Tensor {
    let z = logits.data();
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    Tensor::vector(&exps.iter().map(|e| e / total).collect::<Vec<_>>())
}

/// `-ln p[gold]`.
pub fn cross_entropy(probabilities: &Tensor, gold: usize) -> f64 {
    -probabilities.data()[gold].ln()
}

/// `scale * (p - one_hot(gold))`: gradient of the cross-entropy of softmax
/// w.r.t. the logits.
pub fn softmax_cross_entropy_grad(probabilities: &Tensor, gold: usize, scale: f64) -> Tensor {
    let mut g: Vec<f64> = probabilities.data().iter().map(|&p| p * scale).collect();
    g[gold] -= scale;
    Tensor::vector(&g)
}

/// Index of the largest entry; the lowest index wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
