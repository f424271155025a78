//! Step-size stability bounds.
//!
//! Mean stability requires `0 < μ < 2/λ_max(C_zM)`. Mean-square stability
//! requires `μ < min{ 1/λ_max(P⁻¹Q), 1/max{λ(G) ∈ ℝ_{>0}} }`, which keeps
//! every eigenvalue of `F(μ) = I − μP + μ²Q` strictly inside the unit disc.

use super::operators::VarianceRelationOperators;
use super::stats::SecondOrderStats;
use super::{TheoryError, TheoryResult};
use crate::algebra::{eig_general, eig_hermitian, solve_matrix, AlgebraError};

/// Relative imaginary-part threshold below which an eigenvalue counts as
/// real. Sampling noise in the estimated fourth moments perturbs eigenvalues
/// off the real axis, so an exact-zero test would be meaningless.
const REAL_EIGENVALUE_TOL: f64 = 1e-8;

/// Mean-square bound with its two branches and any numerical caveats.
#[derive(Debug, Clone)]
pub struct StabilityBound {
    pub bound: f64,
    /// `1/λ_max(P⁻¹Q)`; infinite when `P⁻¹Q` has no positive real eigenvalue.
    pub p_inv_q_branch: f64,
    /// `1/max{λ(G) ∈ ℝ_{>0}}`; infinite when `G` has no such eigenvalue.
    pub g_branch: f64,
    pub warnings: Vec<String>,
}

/// Mean-stability bound `2/λ_max(C_zM)`.
///
/// A zero masked covariance makes the recursion unconditionally unbiased and
/// the bound unbounded (`+∞`).
pub fn mean_stability_bound(stats: &SecondOrderStats) -> TheoryResult<f64> {
    let eig = eig_hermitian(&stats.c_z_m)?;
    let lambda_max = eig.real_values().first().copied().unwrap_or(0.0);
    if lambda_max <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 / lambda_max)
}

fn max_real_positive_eigenvalue(values: &[num_complex::Complex64]) -> (f64, bool) {
    let mut best = f64::NEG_INFINITY;
    let mut complex_dominates = false;
    for lambda in values {
        let near_real = lambda.im.abs() <= REAL_EIGENVALUE_TOL * (1.0 + lambda.norm());
        if near_real && lambda.re > 0.0 {
            best = best.max(lambda.re);
        } else if !near_real && lambda.re > best && lambda.re > 0.0 {
            complex_dominates = true;
        }
    }
    (best, complex_dominates)
}

/// Mean-square stability bound from the variance-relation operators.
///
/// Verifies `P ≻ 0` and that the Hermitian part of `Q` is PSD within
/// sampling tolerance; violations are reported as warnings rather than hard
/// failures because partial-update fourth moments are only approximately
/// Hermitian.
pub fn mean_square_stability_bound(
    ops: &VarianceRelationOperators,
) -> TheoryResult<StabilityBound> {
    let mut warnings = Vec::new();

    let p_eig = eig_hermitian(&ops.p)?;
    let p_vals = p_eig.real_values();
    let p_min = p_vals.last().copied().unwrap_or(0.0);
    if p_min <= 0.0 {
        return Err(TheoryError::Algebra(AlgebraError::InvalidArgument(format!(
            "P is not positive definite (λ_min = {p_min:.3e})"
        ))));
    }

    let mut q_herm = ops.q.clone();
    let q_defect = q_herm.hermitian_defect();
    let q_scale = ops.q.frobenius_norm().max(1.0);
    q_herm.symmetrize_hermitian();
    let q_eig = eig_hermitian(&q_herm)?;
    let q_min = q_eig.real_values().last().copied().unwrap_or(0.0);
    if q_min < -1e-6 * q_scale {
        warnings.push(format!(
            "Hermitian part of Q has λ_min = {q_min:.3e} (scale {q_scale:.3e})"
        ));
    }
    if q_defect > 1e-3 * q_scale {
        warnings.push(format!(
            "Q deviates from Hermitian by {q_defect:.3e} (scale {q_scale:.3e}); expected for partial-update masks"
        ));
    }

    // Branch 1: 1/λ_max(P⁻¹Q).
    let p_inv_q = solve_matrix(&ops.p, &ops.q)?;
    let piq_eig = eig_general(&p_inv_q)?;
    let (piq_max, piq_complex) = max_real_positive_eigenvalue(&piq_eig.values);
    if piq_complex {
        warnings.push(
            "P⁻¹Q has complex eigenvalues with real part above the largest near-real one".into(),
        );
    }
    let p_inv_q_branch = if piq_max > 0.0 {
        1.0 / piq_max
    } else {
        f64::INFINITY
    };

    // Branch 2: 1/max{λ(G) ∈ ℝ>0}.
    let g_eig = eig_general(&ops.g)?;
    let (g_max, _) = max_real_positive_eigenvalue(&g_eig.values);
    let g_branch = if g_max > 0.0 {
        1.0 / g_max
    } else {
        f64::INFINITY
    };

    Ok(StabilityBound {
        bound: p_inv_q_branch.min(g_branch),
        p_inv_q_branch,
        g_branch,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CMatrix;
    use crate::theory::operators::{assemble_f, assemble_g};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn synthetic_ops(p: CMatrix, q: CMatrix, mu: f64) -> VarianceRelationOperators {
        let f = assemble_f(mu, &p, &q);
        let g = assemble_g(&p, &q);
        let dim = p.rows();
        VarianceRelationOperators {
            mu,
            n_taps: 1,
            m_selected: 1,
            c_m: crate::algebra::CVector::zeros(dim),
            p,
            q,
            f,
            g,
            sample_count: 0,
        }
    }

    #[test]
    fn scalar_case_complex_g_eigenvalues_fall_back_to_p_inv_q() {
        // P = 2, Q = 1: λ_max(P⁻¹Q) = 1/2 gives branch 2; G's eigenvalues
        // solve λ² − λ + 1/2 = 0 and are complex, so that branch is +∞.
        let p = CMatrix::diag(&[c(2.0, 0.0)]);
        let q = CMatrix::diag(&[c(1.0, 0.0)]);
        let bound = mean_square_stability_bound(&synthetic_ops(p, q, 0.01)).unwrap();
        assert!((bound.p_inv_q_branch - 2.0).abs() < 1e-10);
        assert!(bound.g_branch.is_infinite());
        assert!((bound.bound - 2.0).abs() < 1e-10);
    }

    #[test]
    fn zero_q_reduces_to_two_over_lambda_max_p() {
        // Q = 0: the P⁻¹Q branch is unbounded and G = [[P/2, 0], [I, 0]]
        // yields 2/λ_max(P).
        let p = CMatrix::diag(&[c(4.0, 0.0), c(1.0, 0.0)]);
        let q = CMatrix::zeros(2, 2);
        let bound = mean_square_stability_bound(&synthetic_ops(p, q, 0.01)).unwrap();
        assert!(bound.p_inv_q_branch.is_infinite());
        assert!((bound.g_branch - 0.5).abs() < 1e-10);
        assert!((bound.bound - 0.5).abs() < 1e-10);
    }

    #[test]
    fn non_positive_definite_p_is_rejected() {
        let p = CMatrix::diag(&[c(1.0, 0.0), c(-0.5, 0.0)]);
        let q = CMatrix::identity(2);
        assert!(mean_square_stability_bound(&synthetic_ops(p, q, 0.01)).is_err());
    }
}
