//! Dense complex eigensolvers.
//!
//! `eig_hermitian` reduces a Hermitian matrix to real symmetric tridiagonal
//! form with complex Householder reflectors and diagonalizes it with
//! implicit-shift QL iterations. `eig_general` reduces a square matrix to
//! upper Hessenberg form and runs single-shift QR with deflation, producing
//! a Schur form whose unitary factor is used for the residual backcheck.
//!
//! Matrices here are small (a few hundred rows), so both solvers favor
//! robustness over speed.

use num_complex::Complex64;

use super::matrix::{CMatrix, CVector};
use super::{AlgebraError, AlgebraResult};

/// Convergence controls shared by both eigensolvers.
#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    /// Relative off-diagonal mass below which an entry is treated as zero.
    pub tol: f64,
    /// Iteration cap as a multiple of the matrix dimension.
    pub max_sweeps_factor: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_sweeps_factor: 100,
        }
    }
}

/// Eigendecomposition result.
///
/// For every returned pair `(λ, v)` the backcheck guarantees
/// `‖A v − λ v‖ ≤ residual · ‖A‖`. When `vectors` is `None` the residual is
/// measured on the Schur factorization instead.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub values: Vec<Complex64>,
    pub vectors: Option<CMatrix>,
    pub residual: f64,
}

impl EigenResult {
    /// Eigenvalues as real parts; panics in debug builds if any eigenvalue
    /// carries a non-negligible imaginary part.
    pub fn real_values(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|l| {
                debug_assert!(l.im.abs() <= 1e-8 * (1.0 + l.norm()));
                l.re
            })
            .collect()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and sorted descending; eigenvectors are orthonormal
/// columns of the returned matrix.
pub fn eig_hermitian(a: &CMatrix) -> AlgebraResult<EigenResult> {
    eig_hermitian_with(a, EigenOptions::default())
}

pub fn eig_hermitian_with(a: &CMatrix, opts: EigenOptions) -> AlgebraResult<EigenResult> {
    if !a.is_square() {
        return Err(AlgebraError::DimensionMismatch(format!(
            "eig_hermitian requires a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(EigenResult {
            values: vec![],
            vectors: Some(CMatrix::zeros(0, 0)),
            residual: 0.0,
        });
    }
    let scale = a.frobenius_norm().max(1.0);
    if a.hermitian_defect() > 1e-8 * scale {
        return Err(AlgebraError::InvalidArgument(
            "eig_hermitian input is not Hermitian".into(),
        ));
    }
    let mut work = a.clone();
    work.symmetrize_hermitian();

    let mut u = CMatrix::identity(n);
    let (mut d, mut e) = tridiagonalize_hermitian(&mut work, &mut u);
    ql_implicit_shift(&mut d, &mut e, &mut u, opts)?;

    // Sort descending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).unwrap());
    let values: Vec<Complex64> = order.iter().map(|&i| Complex64::new(d[i], 0.0)).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, new_col)] = u[(row, old_col)];
        }
    }

    let norm_a = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut residual = 0.0_f64;
    for (k, lambda) in values.iter().enumerate() {
        let v = vectors.column(k);
        let mut av = a.matvec(&v);
        for i in 0..n {
            av[i] -= lambda * v[i];
        }
        residual = residual.max(av.norm() / norm_a);
    }

    Ok(EigenResult {
        values,
        vectors: Some(vectors),
        residual,
    })
}

/// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
/// form. Accumulates the unitary transform into `u` and returns the diagonal
/// and subdiagonal.
fn tridiagonalize_hermitian(a: &mut CMatrix, u: &mut CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut x = CVector::zeros(m);
        for i in 0..m {
            x[i] = a[(k + 1 + i, k)];
        }
        let tail_norm: f64 = (1..m).map(|i| x[i].norm_sqr()).sum::<f64>().sqrt();
        if tail_norm == 0.0 {
            continue;
        }
        let xnorm = x.norm();
        let alpha = x[0];
        let phase = if alpha.norm() > 0.0 {
            alpha / alpha.norm()
        } else {
            Complex64::ONE
        };
        let beta = -phase * xnorm;
        let mut v = x;
        v[0] -= beta;
        let vnorm = v.norm();
        if vnorm == 0.0 {
            continue;
        }
        let unit = v.scale(Complex64::new(1.0 / vnorm, 0.0));

        // A22 <- (I - 2uu^H) A22 (I - 2uu^H), exploiting Hermitian symmetry.
        let mut p = CVector::zeros(m);
        for i in 0..m {
            let mut acc = Complex64::ZERO;
            for j in 0..m {
                acc += a[(k + 1 + i, k + 1 + j)] * unit[j];
            }
            p[i] = acc;
        }
        let kappa = unit.dot_h(&p).re;
        let mut w = p;
        for i in 0..m {
            w[i] -= kappa * unit[i];
        }
        for i in 0..m {
            for j in 0..m {
                let upd = 2.0 * (unit[i] * w[j].conj() + w[i] * unit[j].conj());
                a[(k + 1 + i, k + 1 + j)] -= upd;
            }
        }

        a[(k + 1, k)] = beta;
        a[(k, k + 1)] = beta.conj();
        for i in 1..m {
            a[(k + 1 + i, k)] = Complex64::ZERO;
            a[(k, k + 1 + i)] = Complex64::ZERO;
        }

        // Accumulate: U <- U * diag(I, H).
        for row in 0..n {
            let mut acc = Complex64::ZERO;
            for j in 0..m {
                acc += u[(row, k + 1 + j)] * unit[j];
            }
            let acc2 = 2.0 * acc;
            for j in 0..m {
                u[(row, k + 1 + j)] -= acc2 * unit[j].conj();
            }
        }
    }

    // Phase-rotate so the subdiagonal becomes real and nonnegative.
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut phase = Complex64::ONE;
    let mut phases = vec![Complex64::ONE; n];
    for i in 0..n {
        phases[i] = phase;
        d[i] = a[(i, i)].re;
        if i + 1 < n {
            let off = a[(i + 1, i)];
            let mag = off.norm();
            e[i] = mag;
            // φ_{i+1} = φ_i · e_i/|e_i| makes conj(φ_{i+1}) e_i φ_i = |e_i|.
            if mag > 0.0 {
                phase *= off / mag;
            }
        }
    }
    for col in 0..n {
        for row in 0..n {
            u[(row, col)] = u[(row, col)] * phases[col];
        }
    }
    (d, e)
}

/// Implicit-shift QL on a real symmetric tridiagonal, rotating the complex
/// eigenvector columns in step.
fn ql_implicit_shift(
    d: &mut [f64],
    e: &mut [f64],
    u: &mut CMatrix,
    opts: EigenOptions,
) -> AlgebraResult<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let mut work_e = vec![0.0; n];
    work_e[..n - 1].copy_from_slice(e);
    let cap = opts.max_sweeps_factor * n;
    let mut total_iter = 0usize;

    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if work_e[m].abs() <= opts.tol * dd.max(f64::MIN_POSITIVE) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total_iter += 1;
            if total_iter > cap {
                return Err(AlgebraError::NoConvergence {
                    sweeps: total_iter,
                    offdiag: work_e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * work_e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + work_e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * work_e[i];
                let b = c * work_e[i];
                r = f.hypot(g);
                work_e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    work_e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..u.rows() {
                    f = u[(k, i + 1)].re;
                    let fi = u[(k, i + 1)].im;
                    let zre = u[(k, i)].re;
                    let zim = u[(k, i)].im;
                    u[(k, i + 1)] = Complex64::new(s * zre + c * f, s * zim + c * fi);
                    u[(k, i)] = Complex64::new(c * zre - s * f, c * zim - s * fi);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            work_e[l] = g;
            work_e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues of a general square complex matrix via Hessenberg reduction
/// and single-shift QR, with a Schur-form residual backcheck.
///
/// Eigenvalues are sorted by descending real part (imaginary part breaks
/// ties); Schur vectors are not exposed, so `vectors` is `None`.
pub fn eig_general(a: &CMatrix) -> AlgebraResult<EigenResult> {
    eig_general_with(a, EigenOptions::default())
}

pub fn eig_general_with(a: &CMatrix, opts: EigenOptions) -> AlgebraResult<EigenResult> {
    if !a.is_square() {
        return Err(AlgebraError::DimensionMismatch(format!(
            "eig_general requires a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(EigenResult {
            values: vec![],
            vectors: None,
            residual: 0.0,
        });
    }
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    hessenberg(&mut h, &mut q);
    schur_qr(&mut h, &mut q, opts)?;

    let mut values: Vec<Complex64> = (0..n).map(|i| h[(i, i)]).collect();
    values.sort_by(|x, y| {
        y.re.partial_cmp(&x.re)
            .unwrap()
            .then(y.im.partial_cmp(&x.im).unwrap())
    });

    // Backcheck ‖A Q − Q T‖ against ‖A‖.
    let aq = a.matmul(&q);
    let qt = q.matmul(&h);
    let norm_a = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let residual = (&aq - &qt).frobenius_norm() / norm_a;

    Ok(EigenResult {
        values,
        vectors: None,
        residual,
    })
}

/// Householder reduction to upper Hessenberg form, accumulating the unitary
/// similarity into `q`.
fn hessenberg(h: &mut CMatrix, q: &mut CMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut x = CVector::zeros(m);
        for i in 0..m {
            x[i] = h[(k + 1 + i, k)];
        }
        let tail: f64 = (1..m).map(|i| x[i].norm_sqr()).sum::<f64>().sqrt();
        if tail == 0.0 {
            continue;
        }
        let xnorm = x.norm();
        let alpha = x[0];
        let phase = if alpha.norm() > 0.0 {
            alpha / alpha.norm()
        } else {
            Complex64::ONE
        };
        let beta = -phase * xnorm;
        let mut v = x;
        v[0] -= beta;
        let vnorm = v.norm();
        if vnorm == 0.0 {
            continue;
        }
        let unit = v.scale(Complex64::new(1.0 / vnorm, 0.0));

        // Left: rows k+1.., all columns.
        for col in 0..n {
            let mut acc = Complex64::ZERO;
            for i in 0..m {
                acc += unit[i].conj() * h[(k + 1 + i, col)];
            }
            let acc2 = 2.0 * acc;
            for i in 0..m {
                h[(k + 1 + i, col)] -= acc2 * unit[i];
            }
        }
        // Right: columns k+1.., all rows; same update accumulates into q.
        for row in 0..n {
            let mut acc = Complex64::ZERO;
            for j in 0..m {
                acc += h[(row, k + 1 + j)] * unit[j];
            }
            let acc2 = 2.0 * acc;
            for j in 0..m {
                h[(row, k + 1 + j)] -= acc2 * unit[j].conj();
            }
        }
        for row in 0..n {
            let mut acc = Complex64::ZERO;
            for j in 0..m {
                acc += q[(row, k + 1 + j)] * unit[j];
            }
            let acc2 = 2.0 * acc;
            for j in 0..m {
                q[(row, k + 1 + j)] -= acc2 * unit[j].conj();
            }
        }
    }
}

/// A complex Givens rotation `[[c, s], [-conj(s), c]]` with real `c`,
/// mapping `(f, g)` to `(r, 0)`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, Complex64::ZERO);
    }
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / d;
    let s = (f / fn_) * g.conj() / d;
    (c, s)
}

fn schur_qr(h: &mut CMatrix, q: &mut CMatrix, opts: EigenOptions) -> AlgebraResult<()> {
    let n = h.rows();
    if n <= 1 {
        return Ok(());
    }
    let cap = opts.max_sweeps_factor * n;
    let mut total_iter = 0usize;
    let mut hi = n - 1;
    let mut stalls = 0usize;

    while hi > 0 {
        // Deflate the trailing subdiagonal entry if negligible.
        let sub = h[(hi, hi - 1)].norm();
        let local = h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm();
        if sub <= opts.tol * local.max(f64::MIN_POSITIVE) {
            h[(hi, hi - 1)] = Complex64::ZERO;
            hi -= 1;
            stalls = 0;
            continue;
        }
        total_iter += 1;
        if total_iter > cap {
            return Err(AlgebraError::NoConvergence {
                sweeps: total_iter,
                offdiag: sub,
            });
        }

        // Active block [lo..=hi].
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo, lo - 1)].norm();
            let l = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if s <= opts.tol * l.max(f64::MIN_POSITIVE) {
                h[(lo, lo - 1)] = Complex64::ZERO;
                break;
            }
            lo -= 1;
        }

        // Wilkinson shift from the trailing 2x2 of the active block.
        let shift = if stalls > 0 && stalls % 12 == 0 {
            // Exceptional shift to break symmetric stalling.
            let m = h[(hi, hi - 1)].norm() + if hi >= 2 { h[(hi - 1, hi - 2)].norm() } else { 0.0 };
            h[(hi, hi)] + Complex64::new(0.75 * m, 0.0)
        } else {
            let a11 = h[(hi - 1, hi - 1)];
            let a12 = h[(hi - 1, hi)];
            let a21 = h[(hi, hi - 1)];
            let a22 = h[(hi, hi)];
            let tr2 = 0.5 * (a11 + a22);
            let det = a11 * a22 - a12 * a21;
            let disc = (tr2 * tr2 - det).sqrt();
            let l1 = tr2 + disc;
            let l2 = tr2 - disc;
            if (l1 - a22).norm() <= (l2 - a22).norm() {
                l1
            } else {
                l2
            }
        };
        stalls += 1;

        // Implicit single-shift bulge chase over the active block.
        let mut f = h[(lo, lo)] - shift;
        let mut g = h[(lo + 1, lo)];
        for k in lo..hi {
            let (c, s) = givens(f, g);
            // Left rotation on rows (k, k+1).
            for col in k.saturating_sub(1)..n {
                let top = h[(k, col)];
                let bot = h[(k + 1, col)];
                h[(k, col)] = c * top + s * bot;
                h[(k + 1, col)] = -s.conj() * top + c * bot;
            }
            // Right rotation on columns (k, k+1); also accumulate into q.
            let row_end = (k + 2).min(hi) + 1;
            for row in 0..row_end {
                let left = h[(row, k)];
                let right = h[(row, k + 1)];
                h[(row, k)] = c * left + s.conj() * right;
                h[(row, k + 1)] = -s * left + c * right;
            }
            for row in 0..n {
                let left = q[(row, k)];
                let right = q[(row, k + 1)];
                q[(row, k)] = c * left + s.conj() * right;
                q[(row, k + 1)] = -s * left + c * right;
            }
            if k + 1 < hi {
                f = h[(k + 1, k)];
                g = h[(k + 2, k)];
            }
        }
    }
    // Clean any residual round-off below the diagonal.
    for i in 1..n {
        for j in 0..i {
            if j + 1 == i {
                continue;
            }
            h[(i, j)] = Complex64::ZERO;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::kron;
    use crate::signal::RngStream;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut RngStream, n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (re, im) = rng.next_gaussian_pair();
                m[(i, j)] = c(re, im);
            }
        }
        m
    }

    fn random_hermitian(rng: &mut RngStream, n: usize) -> CMatrix {
        let m = random_matrix(rng, n);
        let mut h = &m + &m.adjoint();
        h.symmetrize_hermitian();
        h
    }

    fn random_unitary(rng: &mut RngStream, n: usize) -> CMatrix {
        // Gram-Schmidt on a random complex matrix.
        let m = random_matrix(rng, n);
        let mut cols: Vec<CVector> = (0..n).map(|j| m.column(j)).collect();
        for j in 0..n {
            for i in 0..j {
                let proj = cols[i].dot_h(&cols[j]);
                let prev = cols[i].clone();
                cols[j].axpy(-proj, &prev);
            }
            let norm = cols[j].norm();
            let col = cols[j].scale(c(1.0 / norm, 0.0));
            cols[j] = col;
        }
        let mut u = CMatrix::zeros(n, n);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                u[(i, j)] = col[i];
            }
        }
        u
    }

    #[test]
    fn hermitian_diagonal_input() {
        let a = CMatrix::diag(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let r = eig_hermitian(&a).unwrap();
        let vals = r.real_values();
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!((vals[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_constructed_spectrum() {
        let mut rng = RngStream::new(42);
        let u = random_unitary(&mut rng, 2);
        let d = CMatrix::diag(&[c(5.0, 0.0), c(1.0, 0.0)]);
        let a = u.matmul(&d).matmul(&u.adjoint());
        let r = eig_hermitian(&a).unwrap();
        let vals = r.real_values();
        assert!((vals[0] - 5.0).abs() < 1e-10, "got {vals:?}");
        assert!((vals[1] - 1.0).abs() < 1e-10, "got {vals:?}");
    }

    #[test]
    fn hermitian_2x2_characteristic_polynomial() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
        let a = CMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]]);
        let r = eig_hermitian(&a).unwrap();
        let vals = r.real_values();
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_residual_and_orthonormality() {
        let mut rng = RngStream::new(0xE16);
        for n in [2usize, 5, 8, 16] {
            let a = random_hermitian(&mut rng, n);
            let r = eig_hermitian(&a).unwrap();
            assert!(r.residual <= 1e-10, "residual {} at n={}", r.residual, n);
            let v = r.vectors.unwrap();
            let gram = v.adjoint().matmul(&v);
            let defect = (&gram - &CMatrix::identity(n)).frobenius_norm();
            assert!(defect < 1e-10, "orthonormality defect {defect} at n={n}");
        }
    }

    #[test]
    fn hermitian_trace_and_determinant_invariants() {
        let mut rng = RngStream::new(0x7ACE);
        for n in 2..=6 {
            let a = random_hermitian(&mut rng, n);
            let r = eig_hermitian(&a).unwrap();
            let vals = r.real_values();
            let trace: f64 = vals.iter().sum();
            let norm = a.frobenius_norm();
            assert!((trace - a.trace().re).abs() <= 1e-10 * norm.max(1.0));
            // Determinant via product of eigenvalues vs LU-style expansion
            // through the general solver's Schur form.
            let det_eig: Complex64 = vals.iter().map(|&v| c(v, 0.0)).product();
            let det_direct = determinant(&a);
            assert!(
                (det_eig - det_direct).norm() <= 1e-8 * (1.0 + det_direct.norm()),
                "n={n}: {det_eig} vs {det_direct}"
            );
        }
    }

    fn determinant(a: &CMatrix) -> Complex64 {
        // Gaussian elimination with partial pivoting; test-only oracle.
        let n = a.rows();
        let mut m = a.clone();
        let mut det = Complex64::ONE;
        for k in 0..n {
            let mut piv = k;
            for i in k + 1..n {
                if m[(i, k)].norm() > m[(piv, k)].norm() {
                    piv = i;
                }
            }
            if m[(piv, k)].norm() == 0.0 {
                return Complex64::ZERO;
            }
            if piv != k {
                for j in 0..n {
                    let tmp = m[(k, j)];
                    m[(k, j)] = m[(piv, j)];
                    m[(piv, j)] = tmp;
                }
                det = -det;
            }
            det *= m[(k, k)];
            for i in k + 1..n {
                let factor = m[(i, k)] / m[(k, k)];
                for j in k..n {
                    let sub = factor * m[(k, j)];
                    m[(i, j)] -= sub;
                }
            }
        }
        det
    }

    #[test]
    fn general_upper_triangular_returns_diagonal() {
        let a = CMatrix::from_rows(&[
            vec![c(4.0, 1.0), c(2.0, 0.0), c(-1.0, 3.0)],
            vec![Complex64::ZERO, c(2.0, -2.0), c(5.0, 0.0)],
            vec![Complex64::ZERO, Complex64::ZERO, c(-1.0, 0.5)],
        ]);
        let r = eig_general(&a).unwrap();
        let mut expect = [c(4.0, 1.0), c(2.0, -2.0), c(-1.0, 0.5)];
        expect.sort_by(|x, y| y.re.partial_cmp(&x.re).unwrap());
        for (got, want) in r.values.iter().zip(expect.iter()) {
            assert!((got - want).norm() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn general_companion_matrix_known_roots() {
        // Companion of λ² − 3λ + 2, roots 2 and 1.
        let a = CMatrix::from_real_rows(&[vec![3.0, -2.0], vec![1.0, 0.0]]);
        let r = eig_general(&a).unwrap();
        assert!((r.values[0] - c(2.0, 0.0)).norm() < 1e-10);
        assert!((r.values[1] - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn general_adjoint_spectrum_symmetry() {
        let mut rng = RngStream::new(0xADA);
        for n in [3usize, 6, 10] {
            let a = random_matrix(&mut rng, n);
            let mut sa = eig_general(&a).unwrap().values;
            let mut sah: Vec<Complex64> = eig_general(&a.adjoint())
                .unwrap()
                .values
                .iter()
                .map(|l| l.conj())
                .collect();
            let key = |z: &Complex64| (z.re, z.im);
            sa.sort_by(|x, y| key(y).partial_cmp(&key(x)).unwrap());
            sah.sort_by(|x, y| key(y).partial_cmp(&key(x)).unwrap());
            for (x, y) in sa.iter().zip(sah.iter()) {
                assert!((x - y).norm() <= 1e-8 * (1.0 + x.norm()), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn general_agrees_with_hermitian_solver() {
        let mut rng = RngStream::new(0xAB1E);
        for n in [3usize, 6] {
            let a = random_hermitian(&mut rng, n);
            let rh = eig_hermitian(&a).unwrap().real_values();
            let rg = eig_general(&a).unwrap();
            for (x, y) in rh.iter().zip(rg.values.iter()) {
                assert!((x - y.re).abs() <= 1e-8 * (1.0 + x.abs()));
                assert!(y.im.abs() <= 1e-8 * (1.0 + x.abs()));
            }
        }
    }

    #[test]
    fn general_schur_residual_contract() {
        let mut rng = RngStream::new(0x5C08);
        for n in [2usize, 4, 8, 24] {
            let a = random_matrix(&mut rng, n);
            let r = eig_general(&a).unwrap();
            assert!(r.residual <= 1e-10, "residual {} at n={}", r.residual, n);
        }
    }

    #[test]
    fn general_handles_kron_structured_matrices() {
        // Shapes resembling the variance-relation operators.
        let mut rng = RngStream::new(0x60D);
        let b = random_hermitian(&mut rng, 4);
        let p = &kron(&b.transpose(), &CMatrix::identity(4)) + &kron(&CMatrix::identity(4), &b);
        let r = eig_general(&p).unwrap();
        assert!(r.residual <= 1e-10);
        // P's spectrum is the pairwise sums of b's spectrum.
        let eb = eig_hermitian(&b).unwrap().real_values();
        let mut expect: Vec<f64> = Vec::new();
        for &x in &eb {
            for &y in &eb {
                expect.push(x + y);
            }
        }
        expect.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, want) in r.values.iter().zip(expect.iter()) {
            assert!((got.re - want).abs() <= 1e-8 * (1.0 + want.abs()));
        }
    }
}
