//! Minimal numeric core: tensors, layers with hand-written backward passes,
//! an optimizer and a finite-difference gradient checker.

pub mod conv;
pub mod dense;
pub mod embedding;
pub mod gradcheck;
pub mod init;
pub mod loss;
pub mod optim;
pub mod param;
pub mod pool;
pub mod rng;
pub mod tensor;

pub use conv::{ConvSpec, TemporalConv};
pub use dense::{Activation, Dense, DenseOutput};
pub use embedding::Embedding;
pub use gradcheck::{
    gradient_check, gradient_check_sampled, GradCheckReport, Objective, ParameterCheck,
};
pub use loss::{argmax, cross_entropy, softmax, softmax_cross_entropy_grad};
pub use optim::{Optimizer, OptimizerConfig, UpdateRule};
pub use param::Parameter;
pub use pool::{max_over_time, max_over_time_backward, Pooled};
pub use rng::SeededRng;
pub use tensor::Tensor;
