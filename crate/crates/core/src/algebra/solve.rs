//! LU factorization with partial pivoting and a one-norm condition
//! estimate, backing the linear solves in the variance-relation and
//! steady-state machinery.

use num_complex::Complex64;

use super::matrix::{CMatrix, CVector};
use super::{AlgebraError, AlgebraResult};

/// Condition-estimate cap above which a solve is refused.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

/// Packed LU factors of a square matrix with row pivoting.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: CMatrix,
    perm: Vec<usize>,
    norm_one: f64,
}

impl LuFactors {
    pub fn new(a: &CMatrix) -> AlgebraResult<Self> {
        if !a.is_square() {
            return Err(AlgebraError::DimensionMismatch(format!(
                "LU factorization requires a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let norm_one = a.norm_one();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let mag = lu[(i, k)].norm();
                if mag > best {
                    best = mag;
                    piv = i;
                }
            }
            if best == 0.0 {
                return Err(AlgebraError::IllConditioned {
                    cond: f64::INFINITY,
                    cap: DEFAULT_CONDITION_CAP,
                });
            }
            if piv != k {
                perm.swap(k, piv);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    let sub = factor * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
        Ok(Self { lu, perm, norm_one })
    }

    fn n(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = b`.
    pub fn solve_vec(&self, b: &CVector) -> CVector {
        let n = self.n();
        assert_eq!(b.len(), n, "rhs length mismatch");
        let mut x = CVector::zeros(n);
        for i in 0..n {
            x[i] = b[self.perm[i]];
        }
        // Forward substitution with unit-lower L.
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        // Back substitution with U.
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    /// Solves `A^H x = b` using the factors of `A`.
    pub fn solve_adjoint_vec(&self, b: &CVector) -> CVector {
        let n = self.n();
        assert_eq!(b.len(), n, "rhs length mismatch");
        let mut w = CVector::zeros(n);
        for i in 0..n {
            w[i] = b[i];
        }
        // U^H is lower triangular: forward substitution.
        for i in 0..n {
            let mut acc = w[i];
            for j in 0..i {
                acc -= self.lu[(j, i)].conj() * w[j];
            }
            w[i] = acc / self.lu[(i, i)].conj();
        }
        // L^H is unit upper triangular: back substitution.
        for i in (0..n).rev() {
            let mut acc = w[i];
            for j in i + 1..n {
                acc -= self.lu[(j, i)].conj() * w[j];
            }
            w[i] = acc;
        }
        // Undo the row permutation (A = P^T L U).
        let mut x = CVector::zeros(n);
        for i in 0..n {
            x[self.perm[i]] = w[i];
        }
        x
    }

    /// Hager-style one-norm estimate of `cond_1(A) = ‖A‖₁ ‖A⁻¹‖₁`.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n();
        if n == 0 {
            return 1.0;
        }
        let mut x = CVector::from_vec(vec![Complex64::new(1.0 / n as f64, 0.0); n]);
        let mut est = 0.0f64;
        for _ in 0..5 {
            let y = self.solve_vec(&x);
            let y_norm1: f64 = y.iter().map(|z| z.norm()).sum();
            est = est.max(y_norm1);
            let xi = CVector::from_vec(
                y.iter()
                    .map(|z| {
                        if z.norm() > 0.0 {
                            z / z.norm()
                        } else {
                            Complex64::ONE
                        }
                    })
                    .collect(),
            );
            let z = self.solve_adjoint_vec(&xi);
            let (mut best_j, mut best) = (0usize, 0.0f64);
            for j in 0..n {
                let m = z[j].norm();
                if m > best {
                    best = m;
                    best_j = j;
                }
            }
            let zx = z.dot_h(&x).norm();
            if best <= zx {
                break;
            }
            let mut e = CVector::zeros(n);
            e[best_j] = Complex64::ONE;
            x = e;
        }
        self.norm_one * est
    }
}

/// Solves `a x = b`, refusing matrices whose one-norm condition estimate
/// exceeds [`DEFAULT_CONDITION_CAP`].
pub fn solve(a: &CMatrix, b: &CVector) -> AlgebraResult<CVector> {
    solve_with_cap(a, b, DEFAULT_CONDITION_CAP)
}

pub fn solve_with_cap(a: &CMatrix, b: &CVector, cap: f64) -> AlgebraResult<CVector> {
    if a.rows() != b.len() {
        return Err(AlgebraError::DimensionMismatch(format!(
            "solve: matrix {}x{} vs rhs length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let lu = LuFactors::new(a)?;
    let cond = lu.condition_estimate();
    if !cond.is_finite() || cond > cap {
        return Err(AlgebraError::IllConditioned { cond, cap });
    }
    Ok(lu.solve_vec(b))
}

/// Solves `a X = B` column by column.
pub fn solve_matrix(a: &CMatrix, b: &CMatrix) -> AlgebraResult<CMatrix> {
    if a.rows() != b.rows() {
        return Err(AlgebraError::DimensionMismatch(format!(
            "solve_matrix: matrix {}x{} vs rhs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let lu = LuFactors::new(a)?;
    let cond = lu.condition_estimate();
    if !cond.is_finite() || cond > DEFAULT_CONDITION_CAP {
        return Err(AlgebraError::IllConditioned {
            cond,
            cap: DEFAULT_CONDITION_CAP,
        });
    }
    let mut x = CMatrix::zeros(a.rows(), b.cols());
    for j in 0..b.cols() {
        let col = lu.solve_vec(&b.column(j));
        for i in 0..a.rows() {
            x[(i, j)] = col[i];
        }
    }
    Ok(x)
}
