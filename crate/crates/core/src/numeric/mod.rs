//! Dense-math and neural-network kernels shared by the baseline classifier, DEM and
//! ESZSL.

mod activation;
mod adam;
mod gradcheck;
mod init;
mod layer;
mod linalg;
mod matrix;

pub use activation::{cross_entropy, relu, softmax, softmax_in_place, tanh, Activation, PROB_FLOOR};
pub use adam::{adam_step, AdamConfig, AdamState};
pub use gradcheck::{grad_check, relative_error, GradCheckReport};
pub use init::xavier_uniform;
pub use layer::DenseLayer;
pub use linalg::{cholesky, spd_solve};
pub use matrix::{dot, euclidean_distance, DenseMatrix};
