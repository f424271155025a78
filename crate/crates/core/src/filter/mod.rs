//! The ACLMS and PU-ACLMS recursions, coefficient-selection scheduling,
//! per-step audit quantities, and the energy-conservation check.

pub mod counted;
mod schedule;

pub use counted::{complexity_count, counted_step, Algorithm, OpCount};
pub use schedule::{
    lcg_next, lcg_to_subset, make_schedule, make_schedule_with_partition, LcgState, PartitionKind,
    SelectionMask, SelectionSchedule, UpdateMode,
};

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::CVector;
use crate::signal::RegressorWindow;

/// Error magnitude beyond which a trajectory is flagged as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("filter length {n} is not a multiple of the selection count {m}; unequal subsets would break the fixed selection count")]
    IndivisibleTaps { n: usize, m: usize },
    #[error("selection count must satisfy 1 <= M <= N, got N={n}, M={m}")]
    InvalidSelectionCount { n: usize, m: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown update mode '{0}' (expected full, sequential, or stochastic)")]
    UnknownMode(String),
}

pub type FilterResult<T> = Result<T, FilterError>;

/// The standard/conjugate tap pair `(h, g)`; the stacked form `w = [h; g]`
/// has length `2N`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedWeights {
    pub h: CVector,
    pub g: CVector,
}

impl AugmentedWeights {
    pub fn zeros(n_taps: usize) -> Self {
        Self {
            h: CVector::zeros(n_taps),
            g: CVector::zeros(n_taps),
        }
    }

    pub fn new(h: CVector, g: CVector) -> FilterResult<Self> {
        if h.len() != g.len() {
            return Err(FilterError::DimensionMismatch(format!(
                "standard and conjugate weights must share length, got {} and {}",
                h.len(),
                g.len()
            )));
        }
        Ok(Self { h, g })
    }

    pub fn n_taps(&self) -> usize {
        self.h.len()
    }

    pub fn stacked(&self) -> CVector {
        self.h.stack(&self.g)
    }

    /// Weight error `w̃ = w° − w` against a known optimum.
    pub fn error_from(&self, h_opt: &CVector, g_opt: &CVector) -> Self {
        Self {
            h: h_opt - &self.h,
            g: g_opt - &self.g,
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.h.norm_sq() + self.g.norm_sq()
    }

    pub fn is_finite(&self) -> bool {
        self.h.is_finite() && self.g.is_finite()
    }
}

/// Per-step audit record.
///
/// `e` is the output error; the a priori error `e_a`, the partial-update a
/// priori/a posteriori errors `eps_a`/`eps_p`, and the noise sample are only
/// available when the step was run with oracle access to the true plant.
#[derive(Debug, Clone, Copy)]
pub struct StepAudit {
    pub e: Complex64,
    pub e_a: Option<Complex64>,
    pub eps_a: Option<Complex64>,
    pub eps_p: Option<Complex64>,
    pub u_m_normsq: f64,
    pub diverged: bool,
}

/// Oracle data available in simulation: the true plant weights and the
/// noise realization that produced the current desired sample.
#[derive(Debug, Clone, Copy)]
pub struct StepOracle<'a> {
    pub h_opt: &'a CVector,
    pub g_opt: &'a CVector,
    pub upsilon: Complex64,
}

/// Widely-linear filter output `y(n) = u^T h + u^H g`.
pub fn filter_output(w: &AugmentedWeights, u: &RegressorWindow) -> Complex64 {
    assert_eq!(w.n_taps(), u.len(), "filter_output dimension mismatch");
    widely_linear_form(u.taps(), &w.h, &w.g)
}

/// Evaluates `u^T a + u^H b` with a fixed summation order so alternative
/// implementations can reproduce it bit for bit.
#[inline]
fn widely_linear_form(u: &CVector, a: &CVector, b: &CVector) -> Complex64 {
    let mut standard = Complex64::ZERO;
    for k in 0..u.len() {
        standard += u[k] * a[k];
    }
    let mut conjugate = Complex64::ZERO;
    for k in 0..u.len() {
        conjugate += u[k].conj() * b[k];
    }
    standard + conjugate
}

/// Masked widely-linear form over the selected taps only.
fn widely_linear_form_masked(
    u: &CVector,
    a: &CVector,
    b: &CVector,
    mask: &SelectionMask,
) -> Complex64 {
    let mut standard = Complex64::ZERO;
    for k in 0..u.len() {
        if mask.is_selected(k) {
            standard += u[k] * a[k];
        }
    }
    let mut conjugate = Complex64::ZERO;
    for k in 0..u.len() {
        if mask.is_selected(k) {
            conjugate += u[k].conj() * b[k];
        }
    }
    standard + conjugate
}

fn masked_norm_sq(u: &CVector, mask: &SelectionMask) -> f64 {
    let mut acc = 0.0;
    for k in 0..u.len() {
        if mask.is_selected(k) {
            acc += u[k].norm_sqr();
        }
    }
    acc
}

/// One PU-ACLMS iteration: `h ← h + μe(mask∘u*)`, `g ← g + μe(mask∘u)`.
///
/// Unselected taps are left untouched (not even a zero add), so they stay
/// bit-identical across the update.
pub fn pu_aclms_step(
    w: &AugmentedWeights,
    u: &RegressorWindow,
    d: Complex64,
    mu: f64,
    mask: &SelectionMask,
) -> (AugmentedWeights, StepAudit) {
    pu_aclms_step_inner(w, u, d, mu, mask, None)
}

/// PU-ACLMS iteration with oracle access, filling the audit error fields.
pub fn pu_aclms_step_with_oracle(
    w: &AugmentedWeights,
    u: &RegressorWindow,
    d: Complex64,
    mu: f64,
    mask: &SelectionMask,
    oracle: &StepOracle<'_>,
) -> (AugmentedWeights, StepAudit) {
    pu_aclms_step_inner(w, u, d, mu, mask, Some(oracle))
}

fn pu_aclms_step_inner(
    w: &AugmentedWeights,
    u: &RegressorWindow,
    d: Complex64,
    mu: f64,
    mask: &SelectionMask,
    oracle: Option<&StepOracle<'_>>,
) -> (AugmentedWeights, StepAudit) {
    let n = w.n_taps();
    assert_eq!(u.len(), n, "regressor/weight length mismatch");
    assert_eq!(mask.n(), n, "mask/weight length mismatch");

    let y = filter_output(w, u);
    let e = d - y;
    let mu_e = mu * e;
    let taps = u.taps();

    let (e_a, eps_a) = match oracle {
        Some(orc) => {
            let h_err = orc.h_opt - &w.h;
            let g_err = orc.g_opt - &w.g;
            let e_a = widely_linear_form(taps, &h_err, &g_err);
            let eps_a = widely_linear_form_masked(taps, &h_err, &g_err, mask);
            (Some(e_a), Some(eps_a))
        }
        None => (None, None),
    };

    let mut next = w.clone();
    for k in 0..n {
        if mask.is_selected(k) {
            next.h[k] += mu_e * taps[k].conj();
            next.g[k] += mu_e * taps[k];
        }
    }

    let eps_p = oracle.map(|orc| {
        let h_err = orc.h_opt - &next.h;
        let g_err = orc.g_opt - &next.g;
        widely_linear_form_masked(taps, &h_err, &g_err, mask)
    });

    let diverged = !next.is_finite() || !e.is_finite() || e.norm() > DIVERGENCE_LIMIT;
    let audit = StepAudit {
        e,
        e_a,
        eps_a,
        eps_p,
        u_m_normsq: masked_norm_sq(taps, mask),
        diverged,
    };
    (next, audit)
}

/// Plain full-update ACLMS iteration, coded independently of the masked
/// path for cross-validation.
pub fn aclms_step(
    w: &AugmentedWeights,
    u: &RegressorWindow,
    d: Complex64,
    mu: f64,
) -> (AugmentedWeights, Complex64) {
    let n = w.n_taps();
    assert_eq!(u.len(), n);
    let taps = u.taps();
    let mut standard = Complex64::ZERO;
    for k in 0..n {
        standard += taps[k] * w.h[k];
    }
    let mut conjugate = Complex64::ZERO;
    for k in 0..n {
        conjugate += taps[k].conj() * w.g[k];
    }
    let e = d - (standard + conjugate);
    let mu_e = mu * e;
    let mut next = w.clone();
    for k in 0..n {
        next.h[k] += mu_e * taps[k].conj();
        next.g[k] += mu_e * taps[k];
    }
    (next, e)
}

/// Reduced-size form of the partial update: the selected taps are gathered
/// into `M`-long sub-vectors, updated as a reduced adaptive filter, and
/// scattered back. Numerically identical to the masked form.
pub fn pu_aclms_step_reduced(
    w: &AugmentedWeights,
    u: &RegressorWindow,
    d: Complex64,
    mu: f64,
    mask: &SelectionMask,
) -> (AugmentedWeights, Complex64) {
    let n = w.n_taps();
    assert_eq!(u.len(), n);
    let taps = u.taps();

    // The error uses the full filter output; only the update is reduced.
    let y = filter_output(w, u);
    let e = d - y;
    let mu_e = mu * e;

    let selected = mask.selected_indices();
    let mut h_sub: Vec<Complex64> = selected.iter().map(|&k| w.h[k]).collect();
    let mut g_sub: Vec<Complex64> = selected.iter().map(|&k| w.g[k]).collect();
    let u_sub: Vec<Complex64> = selected.iter().map(|&k| taps[k]).collect();

    for j in 0..selected.len() {
        h_sub[j] += mu_e * u_sub[j].conj();
        g_sub[j] += mu_e * u_sub[j];
    }

    let mut next = w.clone();
    for (j, &k) in selected.iter().enumerate() {
        next.h[k] = h_sub[j];
        next.g[k] = g_sub[j];
    }
    (next, e)
}

/// Outcome of the per-step energy-conservation audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyAudit {
    /// Both sides of the balance were evaluated; `residual = |LHS − RHS|`.
    Checked { residual: f64, lhs: f64, rhs: f64 },
    /// The selected regressor energy was zero, so the balance (which divides
    /// by `‖u_M‖²`) does not apply at this iteration.
    Skipped,
}

impl EnergyAudit {
    /// Residual relative to `1 + |LHS|`; zero for skipped iterations.
    pub fn relative_residual(&self) -> f64 {
        match self {
            EnergyAudit::Checked { residual, lhs, .. } => residual / (1.0 + lhs.abs()),
            EnergyAudit::Skipped => 0.0,
        }
    }
}

/// Evaluates the exact energy balance linking the selected-tap weight-error
/// energies with the partial-update a priori and a posteriori errors:
///
/// `‖h̃_M'‖² + ‖g̃_M'‖² + |ε_a|²/(2‖u_M‖²) = ‖h̃_M‖² + ‖g̃_M‖² + |ε_p|²/(2‖u_M‖²)`
///
/// where primes denote the post-update errors. Requires the true plant
/// weights (simulation context) to form `w̃`.
pub fn energy_audit_check(
    w_tilde_before: &AugmentedWeights,
    w_tilde_after: &AugmentedWeights,
    u: &RegressorWindow,
    mask: &SelectionMask,
) -> EnergyAudit {
    let taps = u.taps();
    let u_m_normsq = masked_norm_sq(taps, mask);
    if u_m_normsq == 0.0 {
        return EnergyAudit::Skipped;
    }
    let eps_a = widely_linear_form_masked(taps, &w_tilde_before.h, &w_tilde_before.g, mask);
    let eps_p = widely_linear_form_masked(taps, &w_tilde_after.h, &w_tilde_after.g, mask);

    let mut before_energy = 0.0;
    let mut after_energy = 0.0;
    for k in 0..taps.len() {
        if mask.is_selected(k) {
            before_energy += w_tilde_before.h[k].norm_sqr() + w_tilde_before.g[k].norm_sqr();
            after_energy += w_tilde_after.h[k].norm_sqr() + w_tilde_after.g[k].norm_sqr();
        }
    }
    let lhs = after_energy + eps_a.norm_sqr() / (2.0 * u_m_normsq);
    let rhs = before_energy + eps_p.norm_sqr() / (2.0 * u_m_normsq);
    EnergyAudit::Checked {
        residual: (lhs - rhs).abs(),
        lhs,
        rhs,
    }
}

/// Stateful PU-ACLMS instance: owns its weights, schedule, and iteration
/// counter. Instances are independent values and can be moved to worker
/// threads; each mutates only its own state.
#[derive(Debug, Clone)]
pub struct PuAclms {
    weights: AugmentedWeights,
    mu: f64,
    schedule: SelectionSchedule,
    iteration: u64,
    diverged_at: Option<u64>,
}

impl PuAclms {
    pub fn new(weights: AugmentedWeights, mu: f64, schedule: SelectionSchedule) -> Self {
        assert_eq!(weights.n_taps(), schedule.n(), "weights/schedule mismatch");
        assert!(mu >= 0.0, "step size must be nonnegative");
        Self {
            weights,
            mu,
            schedule,
            iteration: 0,
            diverged_at: None,
        }
    }

    pub fn zero_init(n_taps: usize, mu: f64, schedule: SelectionSchedule) -> Self {
        Self::new(AugmentedWeights::zeros(n_taps), mu, schedule)
    }

    pub fn weights(&self) -> &AugmentedWeights {
        &self.weights
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// First iteration at which divergence was detected, if any.
    pub fn diverged_at(&self) -> Option<u64> {
        self.diverged_at
    }

    pub fn schedule(&self) -> &SelectionSchedule {
        &self.schedule
    }

    pub fn step(&mut self, u: &RegressorWindow, d: Complex64) -> StepAudit {
        let mask = self.schedule.next_mask(self.iteration);
        let (next, audit) = pu_aclms_step(&self.weights, u, d, self.mu, &mask);
        self.commit(next, &audit);
        audit
    }

    pub fn step_with_oracle(
        &mut self,
        u: &RegressorWindow,
        d: Complex64,
        oracle: &StepOracle<'_>,
    ) -> StepAudit {
        let mask = self.schedule.next_mask(self.iteration);
        let (next, audit) = pu_aclms_step_with_oracle(&self.weights, u, d, self.mu, &mask, oracle);
        self.commit(next, &audit);
        audit
    }

    fn commit(&mut self, next: AugmentedWeights, audit: &StepAudit) {
        if audit.diverged && self.diverged_at.is_none() {
            self.diverged_at = Some(self.iteration);
        }
        self.weights = next;
        self.iteration += 1;
    }
}
