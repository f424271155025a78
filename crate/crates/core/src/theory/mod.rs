//! Closed-form predictors: second-order statistics estimation, steady-state
//! EMSE/MSD, mean and mean-square stability bounds, the Kronecker-structured
//! learning-curve recursion, and decay-rate comparison.

mod decay;
mod learning_curve;
mod operators;
mod stability;
mod stats;
mod steady_state;

pub use decay::{decay_rates, DecayRates};
pub use learning_curve::{learning_curves, LearningCurvePoint, CURVE_TAP_CAP};
pub use operators::{build_operators, OperatorOptions, VarianceRelationOperators, OPERATOR_TAP_CAP};
pub use stability::{mean_square_stability_bound, mean_stability_bound, StabilityBound};
pub use stats::{estimate_stats, estimate_stats_ar, SecondOrderStats, StatsOptions};
pub use steady_state::{
    emse_steady_exact, emse_steady_small_mu, emse_steady_variance_relation, rho_m_from_errors,
    PredictionMethod, SteadyStatePrediction,
};

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::filter::FilterError;
use crate::signal::SignalError;

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },
    #[error("operator build exceeds budget: N={n} taps, cap {cap} (matrices scale as (2N)^4)")]
    BudgetExceeded { n: usize, cap: usize },
    #[error("step-size too large for this formula: denominator {denominator:.6e} is not positive")]
    StepSizeTooLarge { denominator: f64 },
    #[error("at or beyond the mean-square stability boundary: I − F is singular or ill-conditioned ({detail})")]
    AtStabilityBoundary { detail: String },
    #[error("theoretically unstable step size: learning-curve state became non-finite at iteration {iteration}")]
    UnstableStepSize { iteration: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

pub type TheoryResult<T> = Result<T, TheoryError>;
