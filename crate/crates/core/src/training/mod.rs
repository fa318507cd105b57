//! Weighted-fidelity training: loss, gradients, optimizer, grid search.

mod adam;
mod gradient;
mod grid;
mod loss;
mod train;

pub use adam::Adam;
pub use gradient::{
    gradient_adjoint, gradient_finite_difference, gradient_parameter_shift, loss_and_gradient, GradientMethod,
    GradientVector, DEFAULT_FD_STEP,
};
pub use grid::{
    derive_seed, grid_search, mean, run_trial, GridReport, GridSettings, Lattice, LatticePoint, PointSummary,
    TrialResult,
};
pub use loss::{weighted_fidelity_loss, LossValue};
pub use train::{accuracy, evaluate, train, train_from, EarlyStopping, TrainConfig, TrainOutcome};
