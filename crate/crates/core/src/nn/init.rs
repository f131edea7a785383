use crate::nn::rng::SeededRng;
use crate::nn::tensor::Tensor;

/// Half-width of the uniform range used for randomly initialised embeddings.
pub const EMBEDDING_INIT_RANGE: f64 = 0.05;

/// Uniform initialisation scaled by fan-in and fan-out: `U(-a, a)` with
/// `a = sqrt(6 / (fan_in + fan_out))`.
pub fn glorot_uniform(
    shape: &[usize],
    fan_in: usize,
    fan_out: usize,
    rng: &mut SeededRng,
) -> Tensor {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    Tensor::uniform(shape, -limit, limit, rng)
}

pub fn embedding_uniform(rows: usize, dim: usize, rng: &mut SeededRng) -> Tensor {
    Tensor::uniform(
        &[rows, dim],
        -EMBEDDING_INIT_RANGE,
        EMBEDDING_INIT_RANGE,
        rng,
    )
}
