//! Counted-arithmetic reference path.
//!
//! Mirrors one filter iteration while tallying every real multiplication and
//! addition actually performed, so the per-iteration cost model can be
//! checked against an instrumented execution. The fast path in the parent
//! module performs the same math without counting.

use num_complex::Complex64;

use super::{AugmentedWeights, SelectionMask};
use crate::signal::RegressorWindow;

/// Real-operation tally for one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCount {
    pub mults: u64,
    pub adds: u64,
}

/// Which per-iteration cost model applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Full-update ACLMS.
    Aclms,
    /// Sequential partial update (deterministic subset selection).
    SequentialPu,
    /// Stochastic partial update (LCG-driven subset selection).
    StochasticPu,
}

/// Closed-form per-iteration cost of each algorithm in real multiplications
/// and additions.
pub fn complexity_count(algorithm: Algorithm, n: usize, m: usize) -> OpCount {
    let (n, m) = (n as u64, m as u64);
    match algorithm {
        Algorithm::Aclms => OpCount {
            mults: 16 * n + 2,
            adds: 16 * n,
        },
        Algorithm::SequentialPu => OpCount {
            mults: 8 * (n + m) + 2,
            adds: 8 * (n + m),
        },
        Algorithm::StochasticPu => OpCount {
            mults: 8 * (n + m) + 4,
            adds: 8 * (n + m) + 2,
        },
    }
}

struct Tally {
    count: OpCount,
}

impl Tally {
    fn new() -> Self {
        Self {
            count: OpCount::default(),
        }
    }

    /// Complex × complex: 4 real multiplications, 2 real additions.
    fn cmul(&mut self, a: Complex64, b: Complex64) -> Complex64 {
        self.count.mults += 4;
        self.count.adds += 2;
        Complex64::new(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)
    }

    /// Complex + complex: 2 real additions.
    fn cadd(&mut self, a: Complex64, b: Complex64) -> Complex64 {
        self.count.adds += 2;
        Complex64::new(a.re + b.re, a.im + b.im)
    }

    /// Complex − complex: 2 real additions.
    fn csub(&mut self, a: Complex64, b: Complex64) -> Complex64 {
        self.count.adds += 2;
        Complex64::new(a.re - b.re, a.im - b.im)
    }

    /// Real × complex: 2 real multiplications.
    fn rmul(&mut self, a: f64, b: Complex64) -> Complex64 {
        self.count.mults += 2;
        Complex64::new(a * b.re, a * b.im)
    }

    /// Scalar scheduler arithmetic (one multiplication, one addition).
    fn scheduler_op(&mut self) {
        self.count.mults += 1;
        self.count.adds += 1;
    }
}

/// One counted iteration.
///
/// For [`Algorithm::StochasticPu`] the subset-selection arithmetic (the LCG
/// advance and the subset map) is included in the tally; the caller still
/// owns the actual scheduler state.
pub fn counted_step(
    algorithm: Algorithm,
    w: &AugmentedWeights,
    u: &RegressorWindow,
    d: Complex64,
    mu: f64,
    mask: &SelectionMask,
) -> (AugmentedWeights, Complex64, OpCount) {
    let n = w.n_taps();
    assert_eq!(u.len(), n);
    assert_eq!(mask.n(), n);
    if algorithm == Algorithm::Aclms {
        assert_eq!(mask.m(), n, "full-update cost model requires M = N");
    }
    let taps = u.taps();
    let mut t = Tally::new();

    if algorithm == Algorithm::StochasticPu {
        t.scheduler_op(); // LCG state advance
        t.scheduler_op(); // state-to-subset map
    }

    // y(n) = u^T h + u^H g: 2N complex products, 2N−1 complex sums.
    let mut standard = t.cmul(taps[0], w.h[0]);
    for k in 1..n {
        let prod = t.cmul(taps[k], w.h[k]);
        standard = t.cadd(standard, prod);
    }
    let mut conjugate = t.cmul(taps[0].conj(), w.g[0]);
    for k in 1..n {
        let prod = t.cmul(taps[k].conj(), w.g[k]);
        conjugate = t.cadd(conjugate, prod);
    }
    let y = t.cadd(standard, conjugate);

    let e = t.csub(d, y);
    let mu_e = t.rmul(mu, e);

    let mut next = w.clone();
    for k in 0..n {
        if mask.is_selected(k) {
            let dh = t.cmul(mu_e, taps[k].conj());
            let dg = t.cmul(mu_e, taps[k]);
            next.h[k] = t.cadd(next.h[k], dh);
            next.g[k] = t.cadd(next.g[k], dg);
        }
    }

    (next, e, t.count)
}
