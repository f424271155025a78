//! Steady-state EMSE/MSD predictors along three routes: the exact
//! energy-conservation expression, its small-step simplification, and the
//! variance-relation linear solve.

use num_complex::Complex64;

use super::operators::VarianceRelationOperators;
use super::stats::SecondOrderStats;
use super::{TheoryError, TheoryResult};
use crate::algebra::{solve, vectorize, AlgebraError, CMatrix};

/// Which formula produced a prediction; recorded so mismatched comparisons
/// are impossible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionMethod {
    ExactEnergy,
    SmallStep,
    VarianceRelation,
}

impl PredictionMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            PredictionMethod::ExactEnergy => "exact-energy",
            PredictionMethod::SmallStep => "small-step",
            PredictionMethod::VarianceRelation => "variance-relation",
        }
    }
}

/// A steady-state prediction.
///
/// The energy-conservation route yields EMSE only, so `msd` is `None` there;
/// the other two methods fill both fields.
#[derive(Debug, Clone)]
pub struct SteadyStatePrediction {
    pub emse: f64,
    pub msd: Option<f64>,
    pub method: PredictionMethod,
    /// The partial-update attenuation constant ρ_M used (M/N by default).
    pub rho_m: f64,
    pub warning: Option<String>,
}

impl SteadyStatePrediction {
    pub fn emse_db(&self) -> f64 {
        10.0 * self.emse.log10()
    }
}

/// Exact energy-conservation steady state:
/// `ζ(∞) = μ σ_υ² tr(C_uM) / (ρ_M − μ tr(C_uM))`.
///
/// With `ρ_M = M/N` and stationary inputs this collapses to the full-update
/// value `μ σ_υ² tr(C_u) / (1 − μ tr(C_u))` independent of `M`.
pub fn emse_steady_exact(
    mu: f64,
    sigma_v2: f64,
    stats: &SecondOrderStats,
    rho_m: Option<f64>,
) -> TheoryResult<SteadyStatePrediction> {
    let rho = rho_m.unwrap_or_else(|| stats.selection_fraction());
    let trace_masked = stats.trace_c_u_m();
    let denominator = rho - mu * trace_masked;
    if denominator <= 0.0 {
        return Err(TheoryError::StepSizeTooLarge { denominator });
    }
    Ok(SteadyStatePrediction {
        emse: mu * sigma_v2 * trace_masked / denominator,
        msd: None,
        method: PredictionMethod::ExactEnergy,
        rho_m: rho,
        warning: None,
    })
}

/// Small-step approximations `ζ(∞) ≈ μ σ_υ² tr(C_u)` and
/// `η(∞) ≈ μ σ_υ² N`. Valid for `μ·tr(C_u) ≪ 1`; a warning is attached
/// above 0.1.
pub fn emse_steady_small_mu(
    mu: f64,
    sigma_v2: f64,
    stats: &SecondOrderStats,
) -> SteadyStatePrediction {
    let trace = stats.trace_c_u();
    let product = mu * trace;
    let warning = if product > 0.1 {
        Some(format!(
            "small-step approximation used at μ·tr(C_u) = {product:.3}, above the 0.1 validity guide"
        ))
    } else {
        None
    };
    SteadyStatePrediction {
        emse: mu * sigma_v2 * trace,
        msd: Some(mu * sigma_v2 * stats.n_taps as f64),
        method: PredictionMethod::SmallStep,
        rho_m: stats.selection_fraction(),
        warning,
    }
}

/// Variance-relation steady state via the linear solve:
/// `ζ(∞) = μ² σ_υ² c_M^T (I − F)⁻¹ vec(C_z)`, and the MSD analogue with
/// `vec(I)` in place of `vec(C_z)`.
pub fn emse_steady_variance_relation(
    mu: f64,
    sigma_v2: f64,
    ops: &VarianceRelationOperators,
    c_z: &CMatrix,
) -> TheoryResult<SteadyStatePrediction> {
    assert!(
        (ops.mu - mu).abs() <= 1e-12 * mu.abs().max(1.0),
        "operators were built for μ = {}, queried at μ = {}",
        ops.mu,
        mu
    );
    let dim = 2 * ops.n_taps;
    let i_minus_f = &CMatrix::identity(ops.f.rows()) - &ops.f;

    let solve_weighting = |rhs: &CMatrix| -> TheoryResult<f64> {
        let sigma = solve(&i_minus_f, &vectorize(rhs)).map_err(|err| match err {
            AlgebraError::IllConditioned { cond, .. } => TheoryError::AtStabilityBoundary {
                detail: format!("condition estimate {cond:.3e}"),
            },
            other => TheoryError::Algebra(other),
        })?;
        Ok(mu * mu * sigma_v2 * ops.c_m.dot(&sigma).re)
    };

    let emse = solve_weighting(c_z)?;
    let msd = solve_weighting(&CMatrix::identity(dim))?;
    Ok(SteadyStatePrediction {
        emse,
        msd: Some(msd),
        method: PredictionMethod::VarianceRelation,
        rho_m: ops.m_selected as f64 / ops.n_taps as f64,
        warning: None,
    })
}

/// Empirical estimate of ρ_M from steady-state error pairs
/// `(ε_a(n), e_a(n))`: the regression coefficient
/// `Re Σ ε_a ē_a / Σ |e_a|²`.
pub fn rho_m_from_errors(pairs: &[(Complex64, Complex64)]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (eps_a, e_a) in pairs {
        num += (eps_a * e_a.conj()).re;
        den += e_a.norm_sqr();
    }
    if den > 0.0 {
        num / den
    } else {
        f64::NAN
    }
}
