//! Mean-error decay-rate comparison between the full update and the two
//! partial-update schemes.
//!
//! Over a block of β iterations the mean weight error contracts by
//! `(I − μC_z*)^β` for the full update, by a single factor `(I − μC_z*)`
//! for the sequential scheme (each subset is visited exactly once per
//! block), and by `(I − (μ/β)C_z*)^β` for the stochastic scheme. The
//! returned rates are the spectral radii of those block maps, assuming a
//! block-diagonal augmented covariance (the tractability assumption behind
//! the comparison — a documented caveat for correlated inputs).

use super::TheoryResult;
use crate::algebra::{eig_hermitian, CMatrix};

#[derive(Debug, Clone, Copy)]
pub struct DecayRates {
    /// Contraction per β iterations, full update.
    pub r_full: f64,
    /// Contraction per β iterations, sequential partial update.
    pub r_seq: f64,
    /// Contraction per β iterations, stochastic partial update.
    pub r_stoch: f64,
    pub beta: usize,
}

impl DecayRates {
    /// Log-rate ratio full/sequential; equals β when the block-diagonal
    /// assumption holds exactly.
    pub fn full_over_seq_speedup(&self) -> f64 {
        self.r_full.ln() / self.r_seq.ln()
    }
}

/// Computes the three block contraction factors from the spectrum of `C_z`.
pub fn decay_rates(mu: f64, c_z: &CMatrix, beta: usize) -> TheoryResult<DecayRates> {
    assert!(beta >= 1);
    let eig = eig_hermitian(c_z)?;
    let values = eig.real_values();
    let radius = |step: f64| -> f64 {
        values
            .iter()
            .map(|&lambda| (1.0 - step * lambda).abs())
            .fold(0.0, f64::max)
    };
    let per_iter_full = radius(mu);
    let per_iter_stoch = radius(mu / beta as f64);
    Ok(DecayRates {
        r_full: per_iter_full.powi(beta as i32),
        r_seq: per_iter_full,
        r_stoch: per_iter_stoch.powi(beta as i32),
        beta,
    })
}
