//! Theoretical EMSE/MSD learning curves.
//!
//! The weighted variance recursion propagates a `(2N)²` weighting vector by
//! repeated application of `F` (never forming matrix powers):
//!
//! `ζ(n+1) = ζ(n) + ‖w°‖²_{Fⁿ(F−I)σ} + μ² σ_υ² c_M^T Fⁿ σ`
//!
//! with `σ = vec(C_z)` for the EMSE and `σ = vec(I)` for the MSD, starting
//! from zero-initialized weights so `ζ(0) = ‖w°‖²_{C_z}` and
//! `η(0) = ‖w°‖²`.

use super::operators::VarianceRelationOperators;
use super::{TheoryError, TheoryResult};
use crate::algebra::{vectorize, CMatrix, CVector};

/// Largest filter length for the curve recursion; each step costs `(2N)⁴`.
pub const CURVE_TAP_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningCurvePoint {
    pub iteration: usize,
    pub emse: f64,
    pub msd: f64,
}

/// Runs the recursion for `horizon` iterations (emitting `horizon + 1`
/// points including iteration 0). `w_opt` is the stacked optimum `[h°; g°]`.
pub fn learning_curves(
    mu: f64,
    sigma_v2: f64,
    w_opt: &CVector,
    ops: &VarianceRelationOperators,
    c_z: &CMatrix,
    horizon: usize,
) -> TheoryResult<Vec<LearningCurvePoint>> {
    if ops.n_taps > CURVE_TAP_CAP {
        return Err(TheoryError::BudgetExceeded {
            n: ops.n_taps,
            cap: CURVE_TAP_CAP,
        });
    }
    let dim = 2 * ops.n_taps;
    assert_eq!(w_opt.len(), dim, "stacked optimum has length 2N");
    assert_eq!(c_z.rows(), dim, "augmented covariance is 2N x 2N");
    assert!(
        (ops.mu - mu).abs() <= 1e-12 * mu.abs().max(1.0),
        "operators were built for μ = {}, queried at μ = {}",
        ops.mu,
        mu
    );

    // ‖x‖²_{vec(Σ)} = (x ⊗ x*)^T vec(Σ).
    let d_w = w_opt.kron(&w_opt.conj());
    let noise_gain = mu * mu * sigma_v2;

    let mut sigma_e = vectorize(c_z);
    let mut sigma_m = vectorize(&CMatrix::identity(dim));
    let mut zeta = d_w.dot(&sigma_e).re;
    let mut eta = d_w.dot(&sigma_m).re;

    let mut points = Vec::with_capacity(horizon + 1);
    points.push(LearningCurvePoint {
        iteration: 0,
        emse: zeta,
        msd: eta,
    });

    for n in 0..horizon {
        let next_e = ops.f.matvec(&sigma_e);
        let next_m = ops.f.matvec(&sigma_m);
        zeta += d_w.dot(&(&next_e - &sigma_e)).re + noise_gain * ops.c_m.dot(&sigma_e).re;
        eta += d_w.dot(&(&next_m - &sigma_m)).re + noise_gain * ops.c_m.dot(&sigma_m).re;
        if !zeta.is_finite() || !eta.is_finite() {
            return Err(TheoryError::UnstableStepSize { iteration: n + 1 });
        }
        sigma_e = next_e;
        sigma_m = next_m;
        points.push(LearningCurvePoint {
            iteration: n + 1,
            emse: zeta,
            msd: eta,
        });
    }
    Ok(points)
}
