//! Sample estimation of the second-order statistics entering the
//! steady-state and stability expressions.
//!
//! The augmented input is `z = [u*; u]`, so the augmented covariance carries
//! the block layout `C_z = [[C_u*, D_u*], [D_u, C_u]]` with `C_u = E[u u^H]`
//! and `D_u = E[u u^T]`. The masked statistics average the selection process
//! of the given schedule: the stochastic scheme draws masks through its LCG,
//! while the sequential scheme contributes its uniform time-average over the
//! β subsets.

use num_complex::Complex64;

use super::{TheoryError, TheoryResult};
use crate::algebra::CMatrix;
use crate::filter::SelectionSchedule;
use crate::signal::{ArModel, ArStream, RegressorWindow, RngStream, TappedDelayLine};

#[derive(Debug, Clone, Copy)]
pub struct StatsOptions {
    /// Number of regressor/mask samples to average over.
    pub samples: usize,
    /// Minimum acceptable sample count.
    pub min_samples: usize,
}

impl Default for StatsOptions {
    fn default() -> Self {
        Self {
            samples: 100_000,
            min_samples: 10_000,
        }
    }
}

/// Estimated input statistics: plain, augmented, and masked covariance
/// matrices, all Hermitian-symmetrized.
#[derive(Debug, Clone)]
pub struct SecondOrderStats {
    /// `C_u = E[u u^H]` (N×N, Hermitian).
    pub c_u: CMatrix,
    /// `D_u = E[u u^T]` (N×N, complex-symmetric).
    pub d_u: CMatrix,
    /// `C_z = E[z z^H]` (2N×2N, Hermitian), assembled from the blocks.
    pub c_z: CMatrix,
    /// Masked covariance `E[I_M u u^H]` averaged over the selection process.
    pub c_u_m: CMatrix,
    /// Masked complementary covariance `E[I_M u u^T]`.
    pub d_u_m: CMatrix,
    /// Masked augmented covariance `C_zM = E[J_M z z^H]`, assembled from the
    /// masked blocks.
    pub c_z_m: CMatrix,
    pub n_taps: usize,
    pub m_selected: usize,
    pub sample_count: usize,
}

impl SecondOrderStats {
    pub fn trace_c_u(&self) -> f64 {
        self.c_u.trace().re
    }

    /// `tr(C_uM) = E‖u_M‖²`.
    pub fn trace_c_u_m(&self) -> f64 {
        self.c_u_m.trace().re
    }

    /// Selection fraction `M/N`, the default value of ρ_M.
    pub fn selection_fraction(&self) -> f64 {
        self.m_selected as f64 / self.n_taps as f64
    }

    /// Non-circularity measure `‖D_u‖ / ‖C_u‖` (Frobenius norms).
    pub fn circularity_measure(&self) -> f64 {
        self.d_u.frobenius_norm() / self.c_u.frobenius_norm()
    }
}

/// Assembles the augmented covariance from its u-space blocks for
/// `z = [u*; u]`.
fn assemble_augmented(c_u: &CMatrix, d_u: &CMatrix) -> CMatrix {
    let n = c_u.rows();
    let mut c_z = CMatrix::zeros(2 * n, 2 * n);
    c_z.set_block(0, 0, &c_u.conj());
    c_z.set_block(0, n, &d_u.conj());
    c_z.set_block(n, 0, d_u);
    c_z.set_block(n, n, c_u);
    c_z
}

/// Averages `u u^H`, `u u^T` and their masked counterparts over a stream of
/// regressor windows, replaying the schedule's selection process.
pub fn estimate_stats<I>(
    regressors: I,
    n_taps: usize,
    schedule: &mut SelectionSchedule,
    opts: StatsOptions,
) -> TheoryResult<SecondOrderStats>
where
    I: IntoIterator<Item = RegressorWindow>,
{
    assert_eq!(schedule.n(), n_taps, "schedule length mismatch");
    let mut c_u = CMatrix::zeros(n_taps, n_taps);
    let mut d_u = CMatrix::zeros(n_taps, n_taps);
    let mut c_u_m = CMatrix::zeros(n_taps, n_taps);
    let mut d_u_m = CMatrix::zeros(n_taps, n_taps);
    let mut count = 0usize;

    for window in regressors {
        let u = window.taps();
        debug_assert_eq!(u.len(), n_taps);
        let mask = schedule.next_mask(count as u64);
        for i in 0..n_taps {
            let ui = u[i];
            let selected = mask.is_selected(i);
            for j in 0..n_taps {
                let herm = ui * u[j].conj();
                let comp = ui * u[j];
                c_u[(i, j)] += herm;
                d_u[(i, j)] += comp;
                if selected {
                    c_u_m[(i, j)] += herm;
                    d_u_m[(i, j)] += comp;
                }
            }
        }
        count += 1;
    }

    if count < opts.min_samples {
        return Err(TheoryError::InsufficientSamples {
            got: count,
            need: opts.min_samples,
        });
    }

    let scale = Complex64::new(1.0 / count as f64, 0.0);
    let mut c_u = c_u.scale(scale);
    let mut d_u = d_u.scale(scale);
    let mut c_u_m = c_u_m.scale(scale);
    let mut d_u_m = d_u_m.scale(scale);

    c_u.symmetrize_hermitian();
    c_u_m.symmetrize_hermitian();
    // Complementary covariances are complex-symmetric.
    let sym = |m: &mut CMatrix| {
        let t = m.transpose();
        *m = (&*m + &t).scale(Complex64::new(0.5, 0.0));
    };
    sym(&mut d_u);
    sym(&mut d_u_m);

    let c_z = assemble_augmented(&c_u, &d_u);
    let c_z_m = assemble_augmented(&c_u_m, &d_u_m);

    Ok(SecondOrderStats {
        c_u,
        d_u,
        c_z,
        c_u_m,
        d_u_m,
        c_z_m,
        n_taps,
        m_selected: schedule.m(),
        sample_count: count,
    })
}

/// Estimates statistics for the AR input model, generating its own warmed-up
/// sample stream.
pub fn estimate_stats_ar(
    model: &ArModel,
    n_taps: usize,
    schedule: &mut SelectionSchedule,
    opts: StatsOptions,
    rng: RngStream,
) -> TheoryResult<SecondOrderStats> {
    let mut stream = ArStream::for_filter(*model, rng, n_taps);
    let mut line = TappedDelayLine::new(n_taps);
    for _ in 0..n_taps {
        line.push(stream.next_sample());
    }
    let windows = (0..opts.samples).map(move |_| {
        let w = line.window();
        line.push(stream.next_sample());
        w
    });
    estimate_stats(windows, n_taps, schedule, opts)
}
