//! Coefficient-selection scheduling: the mask type, the deterministic
//! round-robin and LCG-driven stochastic subset schedules, and the LCG
//! itself.

use super::{FilterError, FilterResult};

/// Diagonal coefficient-selection mask: `flags[k]` is `i_k(n)` and exactly
/// `m` flags are set. The augmented form applies the same flags to both the
/// standard and conjugate weight blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionMask {
    flags: Vec<bool>,
    m: usize,
}

impl SelectionMask {
    pub fn new(flags: Vec<bool>) -> Self {
        let m = flags.iter().filter(|&&f| f).count();
        Self { flags, m }
    }

    pub fn all_ones(n: usize) -> Self {
        Self {
            flags: vec![true; n],
            m: n,
        }
    }

    pub fn n(&self) -> usize {
        self.flags.len()
    }

    /// Number of selected coefficients, `Σ i_k(n) = M`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_selected(&self, k: usize) -> bool {
        self.flags[k]
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    /// Indices of the selected taps in ascending order.
    pub fn selected_indices(&self) -> Vec<usize> {
        (0..self.flags.len()).filter(|&k| self.flags[k]).collect()
    }
}

/// Linear congruential generator `x(n+1) = (a·x(n) + b) mod c`.
///
/// Defaults are the Numerical-Recipes constants with modulus `2^32`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcgState {
    pub x: u64,
    pub a: u64,
    pub b: u64,
    pub modulus: u64,
}

impl LcgState {
    pub const DEFAULT_A: u64 = 1_664_525;
    pub const DEFAULT_B: u64 = 1_013_904_223;
    pub const DEFAULT_MODULUS: u64 = 1 << 32;

    pub fn new(seed: u64) -> Self {
        Self {
            x: seed % Self::DEFAULT_MODULUS,
            a: Self::DEFAULT_A,
            b: Self::DEFAULT_B,
            modulus: Self::DEFAULT_MODULUS,
        }
    }

    pub fn with_constants(seed: u64, a: u64, b: u64, modulus: u64) -> Self {
        Self {
            x: seed % modulus,
            a,
            b,
            modulus,
        }
    }
}

/// Advances the generator, returning the new state value.
pub fn lcg_next(state: &mut LcgState) -> u64 {
    state.x = (state.a.wrapping_mul(state.x).wrapping_add(state.b)) % state.modulus;
    state.x
}

/// Maps a generator value to a subset index in `{1, …, β}`.
///
/// Uses the equal-width quantizer `⌊β·x/c⌋ + 1`, which makes every subset
/// equally likely for a full-period generator and sends `x = 0` to `1` and
/// `x = c − 1` to `β`.
pub fn lcg_to_subset(x: u64, beta: usize, modulus: u64) -> usize {
    debug_assert!(x < modulus);
    let idx = ((beta as u128 * x as u128) / modulus as u128) as usize + 1;
    idx.clamp(1, beta.max(1))
}

/// How the tap index set is partitioned into subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartitionKind {
    /// `S_t = {(t−1)M+1, …, tM}`.
    #[default]
    Contiguous,
    /// Tap `k` belongs to subset `(k mod β) + 1`.
    Interleaved,
}

/// Update scheme selecting which subset adapts at each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateMode {
    Full,
    Sequential,
    Stochastic,
}

impl UpdateMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            UpdateMode::Full => "full",
            UpdateMode::Sequential => "sequential",
            UpdateMode::Stochastic => "stochastic",
        }
    }
}

impl std::str::FromStr for UpdateMode {
    type Err = FilterError;
    fn from_str(s: &str) -> Result<Self, FilterError> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(UpdateMode::Full),
            "sequential" | "seq" => Ok(UpdateMode::Sequential),
            "stochastic" | "stoch" => Ok(UpdateMode::Stochastic),
            other => Err(FilterError::UnknownMode(other.to_string())),
        }
    }
}

/// Scheduler state producing the coefficient-selection mask per iteration.
///
/// The subsets form a disjoint cover of the tap index set; the sequential
/// scheme cycles through them round-robin while the stochastic scheme draws
/// uniformly via the LCG.
#[derive(Debug, Clone)]
pub struct SelectionSchedule {
    mode: UpdateMode,
    n: usize,
    m: usize,
    beta: usize,
    subsets: Vec<Vec<usize>>,
    lcg: Option<LcgState>,
}

/// Builds a schedule with the default contiguous-block partition.
///
/// Requires `1 ≤ M ≤ N` and `N mod M = 0`; unequal subsets would break the
/// fixed selection count `Σ i_k(n) = M`.
pub fn make_schedule(
    mode: UpdateMode,
    n: usize,
    m: usize,
    seed: u64,
) -> FilterResult<SelectionSchedule> {
    make_schedule_with_partition(mode, n, m, seed, PartitionKind::Contiguous)
}

pub fn make_schedule_with_partition(
    mode: UpdateMode,
    n: usize,
    m: usize,
    seed: u64,
    partition: PartitionKind,
) -> FilterResult<SelectionSchedule> {
    if n == 0 || m == 0 || m > n {
        return Err(FilterError::InvalidSelectionCount { n, m });
    }
    if n % m != 0 {
        return Err(FilterError::IndivisibleTaps { n, m });
    }
    let m_effective = if mode == UpdateMode::Full { n } else { m };
    let beta = n / m_effective;
    let subsets: Vec<Vec<usize>> = match partition {
        PartitionKind::Contiguous => (0..beta)
            .map(|t| (t * m_effective..(t + 1) * m_effective).collect())
            .collect(),
        PartitionKind::Interleaved => (0..beta)
            .map(|t| (0..n).filter(|k| k % beta == t).collect())
            .collect(),
    };
    let lcg = match mode {
        UpdateMode::Stochastic => Some(LcgState::new(seed)),
        _ => None,
    };
    Ok(SelectionSchedule {
        mode,
        n,
        m: m_effective,
        beta,
        subsets,
        lcg,
    })
}

impl SelectionSchedule {
    pub fn mode(&self) -> UpdateMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of subsets, `β = N/M`.
    pub fn beta(&self) -> usize {
        self.beta
    }

    /// Zero-based tap indices of subset `t ∈ {1, …, β}`.
    pub fn subset(&self, t: usize) -> &[usize] {
        &self.subsets[t - 1]
    }

    pub fn lcg(&self) -> Option<&LcgState> {
        self.lcg.as_ref()
    }

    /// Mask for iteration `n` (zero-based at the first adapted sample).
    ///
    /// Sequential selects subset `mod(n, β) + 1`; stochastic draws a subset
    /// through the LCG; full update selects everything. The stochastic
    /// branch advances internal state, so iterations must be consumed in
    /// order.
    pub fn next_mask(&mut self, iteration: u64) -> SelectionMask {
        let subset_index = match self.mode {
            UpdateMode::Full => 1,
            UpdateMode::Sequential => (iteration % self.beta as u64) as usize + 1,
            UpdateMode::Stochastic => {
                let lcg = self.lcg.as_mut().expect("stochastic schedule has an LCG");
                let t = lcg_to_subset(lcg.x, self.beta, lcg.modulus);
                lcg_next(lcg);
                t
            }
        };
        self.mask_for_subset(subset_index)
    }

    pub fn mask_for_subset(&self, t: usize) -> SelectionMask {
        let mut flags = vec![false; self.n];
        for &k in &self.subsets[t - 1] {
            flags[k] = true;
        }
        SelectionMask::new(flags)
    }
}
