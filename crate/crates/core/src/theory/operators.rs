//! The Kronecker-structured operators of the weighted variance relation:
//! the linear part `P`, the fourth-moment part `Q`, the noise-injection
//! vector `c_M`, the iteration matrix `F = I − μP + μ²Q`, and the block
//! matrix `G` used by the mean-square stability bound.
//!
//! `P` is assembled exactly from the estimated masked augmented covariance.
//! `Q` and `c_M` have no closed form for widely-linear AR inputs, so both
//! are estimated by sample averaging over generated regressors and the
//! schedule's selection process.

use num_complex::Complex64;
use rayon::prelude::*;

use super::stats::SecondOrderStats;
use super::{TheoryError, TheoryResult};
use crate::algebra::{kron, vectorize, CMatrix, CVector};
use crate::filter::{SelectionMask, SelectionSchedule};
use crate::signal::{ArModel, ArStream, RngStream, TappedDelayLine};

/// Largest filter length for which the `(2N)² × (2N)²` operators are built.
pub const OPERATOR_TAP_CAP: usize = 16;

#[derive(Debug, Clone, Copy)]
pub struct OperatorOptions {
    /// Regressor/mask draws used to estimate `Q` and `c_M`.
    pub samples: usize,
    /// Fixed shard count for the deterministic parallel reduction.
    pub chunks: usize,
}

impl Default for OperatorOptions {
    fn default() -> Self {
        Self {
            samples: 100_000,
            chunks: 8,
        }
    }
}

/// The assembled variance-relation operators at a fixed step size.
#[derive(Debug, Clone)]
pub struct VarianceRelationOperators {
    pub mu: f64,
    pub n_taps: usize,
    /// Coefficients selected per iteration by the schedule the estimate ran.
    pub m_selected: usize,
    /// `P = C_zM^T ⊗ I + I ⊗ C_zM`, `(2N)²` square.
    pub p: CMatrix,
    /// Sample-averaged fourth-moment operator, `(2N)²` square.
    pub q: CMatrix,
    /// Weighting-to-noise-power functional: `c_M^T vec(Σ) = E‖J_M z‖²_Σ`.
    pub c_m: CVector,
    /// Iteration matrix `F = I − μP + μ²Q`.
    pub f: CMatrix,
    /// Block matrix `[[P/2, −Q/2], [I, 0]]`, `2(2N)²` square.
    pub g: CMatrix,
    pub sample_count: usize,
}

/// `P = C_zM^T ⊗ I + I ⊗ C_zM`.
pub fn assemble_p(c_z_m: &CMatrix) -> CMatrix {
    let dim = c_z_m.rows();
    let eye = CMatrix::identity(dim);
    &kron(&c_z_m.transpose(), &eye) + &kron(&eye, c_z_m)
}

/// `F = I − μP + μ²Q`.
pub fn assemble_f(mu: f64, p: &CMatrix, q: &CMatrix) -> CMatrix {
    let dim = p.rows();
    let mut f = CMatrix::identity(dim);
    let mu_c = Complex64::new(mu, 0.0);
    let mu2 = Complex64::new(mu * mu, 0.0);
    f = &f - &p.scale(mu_c);
    &f + &q.scale(mu2)
}

/// `G = [[P/2, −Q/2], [I, 0]]`.
pub fn assemble_g(p: &CMatrix, q: &CMatrix) -> CMatrix {
    let dim = p.rows();
    let mut g = CMatrix::zeros(2 * dim, 2 * dim);
    g.set_block(0, 0, &p.scale(Complex64::new(0.5, 0.0)));
    g.set_block(0, dim, &q.scale(Complex64::new(-0.5, 0.0)));
    g.set_block(dim, 0, &CMatrix::identity(dim));
    g
}

fn masked_augmented(z: &CVector, mask: &SelectionMask, n_taps: usize) -> CVector {
    let mut jz = CVector::zeros(z.len());
    for i in 0..z.len() {
        if mask.is_selected(i % n_taps) {
            jz[i] = z[i];
        }
    }
    jz
}

struct ChunkAccumulator {
    q: CMatrix,
    m2: CMatrix,
    count: usize,
}

fn accumulate_chunk(
    model: &ArModel,
    n_taps: usize,
    schedule: &SelectionSchedule,
    chunk_samples: usize,
    rng: RngStream,
) -> ChunkAccumulator {
    let dim = 2 * n_taps;
    let dim2 = dim * dim;
    let mut q = CMatrix::zeros(dim2, dim2);
    let mut m2 = CMatrix::zeros(dim, dim);

    let mut stream = ArStream::for_filter(*model, rng, n_taps);
    let mut line = TappedDelayLine::new(n_taps);
    for _ in 0..n_taps {
        line.push(stream.next_sample());
    }
    let mut sched = schedule.clone();

    for iter in 0..chunk_samples {
        let window = line.window();
        let mask = sched.next_mask(iter as u64);
        let z = window.augmented();
        let jz = masked_augmented(&z, &mask, n_taps);

        // m2 += (Jz)(Jz)^H over the selected entries.
        for i in 0..dim {
            if jz[i] == Complex64::ZERO {
                continue;
            }
            for j in 0..dim {
                m2[(i, j)] += jz[i] * jz[j].conj();
            }
        }

        // Q accumulates conj(A) ⊗ A with A = z (Jz)^H, evaluated as the
        // rank-one outer product (z* ⊗ z)(Jz ⊗ Jz*)^T; the right factor is
        // sparse in the selection pattern.
        let mut cols: Vec<(usize, Complex64)> = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            if jz[j] == Complex64::ZERO {
                continue;
            }
            for l in 0..dim {
                if jz[l] == Complex64::ZERO {
                    continue;
                }
                cols.push((j * dim + l, jz[j] * jz[l].conj()));
            }
        }
        for i in 0..dim {
            let zi_conj = z[i].conj();
            for k in 0..dim {
                let r = zi_conj * z[k];
                let row = i * dim + k;
                for &(col, s) in &cols {
                    q[(row, col)] += r * s;
                }
            }
        }

        line.push(stream.next_sample());
    }

    ChunkAccumulator {
        q,
        m2,
        count: chunk_samples,
    }
}

/// Builds the variance-relation operators at step size `mu`.
///
/// `P` comes from the stats' masked augmented covariance; `Q` and `c_M` are
/// estimated over `opts.samples` fresh regressor/mask draws, sharded into a
/// fixed number of chunks that are merged in index order so the result does
/// not depend on worker count.
pub fn build_operators(
    mu: f64,
    stats: &SecondOrderStats,
    schedule: &SelectionSchedule,
    model: &ArModel,
    opts: OperatorOptions,
    rng: &RngStream,
) -> TheoryResult<VarianceRelationOperators> {
    let n_taps = stats.n_taps;
    if n_taps > OPERATOR_TAP_CAP {
        return Err(TheoryError::BudgetExceeded {
            n: n_taps,
            cap: OPERATOR_TAP_CAP,
        });
    }
    assert_eq!(schedule.n(), n_taps, "schedule length mismatch");

    // Chunk sizes are multiples of β so each sequential chunk covers whole
    // round-robin cycles.
    let beta = schedule.beta();
    let chunks = opts.chunks.max(1);
    let per_chunk = opts.samples.div_ceil(chunks).div_ceil(beta) * beta;

    let partials: Vec<ChunkAccumulator> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            accumulate_chunk(
                model,
                n_taps,
                schedule,
                per_chunk,
                rng.split(c as u64),
            )
        })
        .collect();

    let dim = 2 * n_taps;
    let dim2 = dim * dim;
    let mut q = CMatrix::zeros(dim2, dim2);
    let mut m2 = CMatrix::zeros(dim, dim);
    let mut total = 0usize;
    for part in &partials {
        q = &q + &part.q;
        m2 = &m2 + &part.m2;
        total += part.count;
    }
    let scale = Complex64::new(1.0 / total as f64, 0.0);
    let q = q.scale(scale);
    let mut m2 = m2.scale(scale);
    m2.symmetrize_hermitian();

    // c_M^T vec(Σ) must equal tr(E[J z z^H J] Σ); storing the transpose of
    // the Hermitian average makes the plain (unconjugated) dot product land
    // on exactly that trace.
    let c_m = vectorize(&m2.transpose());

    let p = assemble_p(&stats.c_z_m);
    let f = assemble_f(mu, &p, &q);
    let g = assemble_g(&p, &q);

    Ok(VarianceRelationOperators {
        mu,
        n_taps,
        m_selected: schedule.m(),
        p,
        q,
        c_m,
        f,
        g,
        sample_count: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::eig_hermitian;
    use crate::filter::{make_schedule, UpdateMode};
    use crate::theory::stats::{estimate_stats_ar, StatsOptions};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn p_for_identity_covariance_is_twice_identity() {
        let p = assemble_p(&CMatrix::identity(2));
        let expect = CMatrix::identity(4).scale(c(2.0, 0.0));
        assert_eq!(p, expect);
    }

    #[test]
    fn f_at_zero_step_size_is_identity() {
        let mut rng = RngStream::new(1);
        let n = 2;
        let mut p = CMatrix::zeros(n, n);
        let mut q = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = rng.next_gaussian_pair();
                p[(i, j)] = c(a, b);
                let (a, b) = rng.next_gaussian_pair();
                q[(i, j)] = c(a, b);
            }
        }
        assert_eq!(assemble_f(0.0, &p, &q), CMatrix::identity(n));
    }

    #[test]
    fn f_reassembles_from_factors_entrywise() {
        let model = ArModel::default_noncircular();
        let n = 2;
        let mut sched = make_schedule(UpdateMode::Sequential, n, 1, 0).unwrap();
        let stats = estimate_stats_ar(
            &model,
            n,
            &mut sched,
            StatsOptions {
                samples: 20_000,
                min_samples: 10_000,
            },
            RngStream::new(3),
        )
        .unwrap();
        let mu = 0.05;
        let ops = build_operators(
            mu,
            &stats,
            &sched,
            &model,
            OperatorOptions {
                samples: 20_000,
                chunks: 4,
            },
            &RngStream::new(4),
        )
        .unwrap();
        let rebuilt = assemble_f(mu, &ops.p, &ops.q);
        let defect = (&rebuilt - &ops.f).frobenius_norm();
        assert!(defect <= 1e-12 * ops.f.frobenius_norm());
    }

    #[test]
    fn g_block_layout() {
        let p = CMatrix::identity(2).scale(c(2.0, 0.0));
        let q = CMatrix::identity(2);
        let g = assemble_g(&p, &q);
        assert_eq!(g.rows(), 4);
        assert_eq!(g[(0, 0)], c(1.0, 0.0));
        assert_eq!(g[(0, 2)], c(-0.5, 0.0));
        assert_eq!(g[(2, 0)], c(1.0, 0.0));
        assert_eq!(g[(2, 2)], Complex64::ZERO);
    }

    #[test]
    fn budget_guard_rejects_large_filters() {
        let model = ArModel::default_noncircular();
        let n = 32;
        let mut sched = make_schedule(UpdateMode::Full, n, n, 0).unwrap();
        let stats = estimate_stats_ar(
            &model,
            n,
            &mut sched,
            StatsOptions {
                samples: 10_000,
                min_samples: 10_000,
            },
            RngStream::new(5),
        )
        .unwrap();
        let result = build_operators(
            0.01,
            &stats,
            &sched,
            &model,
            OperatorOptions::default(),
            &RngStream::new(6),
        );
        assert!(matches!(result, Err(TheoryError::BudgetExceeded { .. })));
    }

    #[test]
    fn c_m_functional_matches_direct_masked_power() {
        // c_M^T vec(Σ) must reproduce the average of ‖J z‖²_Σ; checked on a
        // fresh sample stream against a random PSD weighting.
        let model = ArModel::default_noncircular();
        let n = 3;
        let mut sched = make_schedule(UpdateMode::Stochastic, n, 1, 9).unwrap();
        let stats = estimate_stats_ar(
            &model,
            n,
            &mut sched,
            StatsOptions {
                samples: 40_000,
                min_samples: 10_000,
            },
            RngStream::new(7),
        )
        .unwrap();
        let ops = build_operators(
            0.02,
            &stats,
            &sched,
            &model,
            OperatorOptions {
                samples: 200_000,
                chunks: 8,
            },
            &RngStream::new(8),
        )
        .unwrap();

        // Random PSD weighting Σ = B^H B.
        let dim = 2 * n;
        let mut rng = RngStream::new(10);
        let mut b = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let (re, im) = rng.next_gaussian_pair();
                b[(i, j)] = c(re, im);
            }
        }
        let sigma = b.adjoint().matmul(&b);

        let via_c_m = ops.c_m.dot(&vectorize(&sigma)).re;

        // Direct average over an independent stream.
        let mut stream = ArStream::for_filter(model, RngStream::new(11), n);
        let mut line = TappedDelayLine::new(n);
        for _ in 0..n {
            line.push(stream.next_sample());
        }
        let mut sched2 = make_schedule(UpdateMode::Stochastic, n, 1, 77).unwrap();
        let draws = 200_000usize;
        let mut acc = 0.0;
        for iter in 0..draws {
            let z = line.window().augmented();
            let mask = sched2.next_mask(iter as u64);
            let jz = masked_augmented(&z, &mask, n);
            acc += jz.dot_h(&sigma.matvec(&jz)).re;
            line.push(stream.next_sample());
        }
        let direct = acc / draws as f64;
        assert!(
            (via_c_m - direct).abs() <= 0.01 * direct.abs().max(1.0),
            "c_M path {via_c_m} vs direct {direct}"
        );
    }

    #[test]
    fn full_update_q_is_nearly_hermitian_psd() {
        let model = ArModel::default_noncircular();
        let n = 2;
        let mut sched = make_schedule(UpdateMode::Full, n, n, 0).unwrap();
        let stats = estimate_stats_ar(
            &model,
            n,
            &mut sched,
            StatsOptions {
                samples: 20_000,
                min_samples: 10_000,
            },
            RngStream::new(12),
        )
        .unwrap();
        let ops = build_operators(
            0.01,
            &stats,
            &sched,
            &model,
            OperatorOptions {
                samples: 50_000,
                chunks: 4,
            },
            &RngStream::new(13),
        )
        .unwrap();
        // With the all-ones mask the per-sample term is an outer product of
        // a vector with itself, so Q is Hermitian PSD up to round-off.
        assert!(ops.q.hermitian_defect() <= 1e-9 * ops.q.frobenius_norm());
        let mut q_herm = ops.q.clone();
        q_herm.symmetrize_hermitian();
        let eig = eig_hermitian(&q_herm).unwrap();
        let min = eig.real_values().last().copied().unwrap();
        assert!(min >= -1e-8 * ops.q.frobenius_norm());
    }
}
