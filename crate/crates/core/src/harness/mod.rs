//! Experiment orchestration: Monte-Carlo trials with independent seeded
//! streams, theoretical predictions, theory-vs-simulation overlays, and
//! steady-state summaries.
//!
//! Trials are embarrassingly parallel. They are sharded into fixed chunks
//! merged in index order, so averages are bitwise reproducible regardless of
//! worker count.

mod config;
mod records;

pub use config::{ExperimentConfig, InitMode, ModeKey};
pub use records::{
    read_csv, steady_state_mean, to_db, write_csv, CurveSource, LearningCurveRecord, CSV_HEADER,
};

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::filter::{make_schedule, FilterError, PuAclms, StepOracle};
use crate::signal::{ArStream, PlantSpec, RngStream, SignalError, TappedDelayLine};
use crate::theory::{
    build_operators, emse_steady_exact, emse_steady_small_mu, emse_steady_variance_relation,
    estimate_stats_ar, learning_curves, mean_square_stability_bound, mean_stability_bound,
    OperatorOptions, SecondOrderStats, StabilityBound, StatsOptions, SteadyStatePrediction,
    TheoryError, VarianceRelationOperators,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("all {trials} trials diverged at μ = {mu} (mean-stability bound ≈ {mean_bound:.4})")]
    AllTrialsDiverged {
        mu: f64,
        trials: usize,
        mean_bound: f64,
    },
    #[error("step size μ = {mu} is at or beyond the mean-square stability bound {bound:.4} (mean bound {mean_bound:.4}); theoretical curves are not defined")]
    UnstableStepSize { mu: f64, bound: f64, mean_bound: f64 },
}

pub type HarnessResult<T> = Result<T, HarnessError>;

// Disjoint split indices for the deterministic stream tree.
const STREAM_PLANT: u64 = u64::MAX;
const STREAM_STATS: u64 = u64::MAX - 1;
const STREAM_OPERATORS: u64 = u64::MAX - 2;
const STREAM_SCHED: u64 = u64::MAX - 3;
const TRIAL_STRIDE: u64 = 4;

/// The plant used by every trial of an experiment: drawn once from the
/// master seed and held fixed.
pub fn experiment_plant(cfg: &ExperimentConfig) -> PlantSpec {
    let mut rng = RngStream::new(cfg.seed).split(STREAM_PLANT);
    PlantSpec::random(cfg.n, cfg.sigma_v2, &mut rng)
}

#[derive(Debug, Clone)]
pub struct MonteCarloOutput {
    /// Trial-averaged curves, one record per iteration.
    pub records: Vec<LearningCurveRecord>,
    /// Mean EMSE over the final steady-state window.
    pub steady_emse: f64,
    /// Mean MSD over the final steady-state window.
    pub steady_msd: f64,
    pub trials_used: usize,
    /// `(trial index, divergence iteration)` of excluded trials.
    pub divergent: Vec<(usize, u64)>,
}

struct TrialCurves {
    emse: Vec<f64>,
    msd: Vec<f64>,
    diverged: Option<u64>,
}

fn run_trial(cfg: &ExperimentConfig, plant: &PlantSpec, trial: usize) -> HarnessResult<TrialCurves> {
    let base = RngStream::new(cfg.seed);
    let t = trial as u64 * TRIAL_STRIDE;
    let input_rng = base.split(t);
    let mut noise_rng = base.split(t + 1);
    let sched_seed = base.split(t + 2).next_u64();
    let mut init_rng = base.split(t + 3);

    let model = cfg.ar_model();
    let mut input = ArStream::for_filter(model, input_rng, cfg.n);
    let schedule = make_schedule(cfg.update_mode(), cfg.n, cfg.m, sched_seed)?;
    let weights = match cfg.init {
        InitMode::Zero => crate::filter::AugmentedWeights::zeros(cfg.n),
        InitMode::Random => {
            let scale = (0.5f64).sqrt();
            let mut draw = |rng: &mut RngStream| {
                let mut v = crate::algebra::CVector::zeros(cfg.n);
                for i in 0..cfg.n {
                    let (re, im) = rng.next_gaussian_pair();
                    v[i] = Complex64::new(re * scale, im * scale);
                }
                v
            };
            let h = draw(&mut init_rng);
            let g = draw(&mut init_rng);
            crate::filter::AugmentedWeights::new(h, g)?
        }
    };
    let mut filt = PuAclms::new(weights, cfg.mu, schedule);

    let mut line = TappedDelayLine::new(cfg.n);
    for _ in 0..cfg.n {
        line.push(input.next_sample());
    }

    let mut emse = Vec::with_capacity(cfg.horizon);
    let mut msd = Vec::with_capacity(cfg.horizon);
    for _ in 0..cfg.horizon {
        let window = line.window();
        let (d, upsilon) = crate::signal::plant_output(&window, plant, &mut noise_rng)?;
        let w_err = filt.weights().error_from(&plant.h_opt, &plant.g_opt);
        msd.push(w_err.norm_sq());
        let oracle = StepOracle {
            h_opt: &plant.h_opt,
            g_opt: &plant.g_opt,
            upsilon,
        };
        let audit = filt.step_with_oracle(&window, d, &oracle);
        emse.push(audit.e_a.expect("oracle step fills e_a").norm_sqr());
        if filt.diverged_at().is_some() {
            break;
        }
        line.push(input.next_sample());
    }
    Ok(TrialCurves {
        emse,
        msd,
        diverged: filt.diverged_at(),
    })
}

/// Runs the Monte-Carlo experiment, averaging EMSE/MSD across trials.
///
/// EMSE is measured against the known plant as `|e_a(n)|²`, MSD as
/// `‖w̃(n)‖²`, both before the iteration's update. Divergent trials are
/// excluded from the averages, counted, and reported with their divergence
/// iteration.
pub fn run_monte_carlo(cfg: &ExperimentConfig) -> HarnessResult<MonteCarloOutput> {
    cfg.validate()?;
    let plant = experiment_plant(cfg);

    const CHUNK: usize = 4;
    let chunk_count = cfg.trials.div_ceil(CHUNK);
    let chunk_results: Vec<HarnessResult<Vec<TrialCurves>>> = (0..chunk_count)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(cfg.trials);
            (lo..hi).map(|t| run_trial(cfg, &plant, t)).collect()
        })
        .collect();

    let mut emse_sum = vec![0.0f64; cfg.horizon];
    let mut msd_sum = vec![0.0f64; cfg.horizon];
    let mut used = 0usize;
    let mut divergent = Vec::new();
    let mut trial_index = 0usize;
    for chunk in chunk_results {
        for trial in chunk? {
            if let Some(iter) = trial.diverged {
                divergent.push((trial_index, iter));
            } else {
                for (acc, v) in emse_sum.iter_mut().zip(trial.emse.iter()) {
                    *acc += v;
                }
                for (acc, v) in msd_sum.iter_mut().zip(trial.msd.iter()) {
                    *acc += v;
                }
                used += 1;
            }
            trial_index += 1;
        }
    }

    if used == 0 {
        let mean_bound = quick_mean_bound(cfg).unwrap_or(f64::NAN);
        return Err(HarnessError::AllTrialsDiverged {
            mu: cfg.mu,
            trials: cfg.trials,
            mean_bound,
        });
    }

    let inv = 1.0 / used as f64;
    let emse_avg: Vec<f64> = emse_sum.iter().map(|v| v * inv).collect();
    let msd_avg: Vec<f64> = msd_sum.iter().map(|v| v * inv).collect();
    let records: Vec<LearningCurveRecord> = emse_avg
        .iter()
        .zip(msd_avg.iter())
        .enumerate()
        .map(|(i, (&e, &m))| LearningCurveRecord::new(i, e, m, CurveSource::Simulated, used))
        .collect();

    Ok(MonteCarloOutput {
        steady_emse: steady_state_mean(&emse_avg, cfg.steady_frac),
        steady_msd: steady_state_mean(&msd_avg, cfg.steady_frac),
        records,
        trials_used: used,
        divergent,
    })
}

fn quick_mean_bound(cfg: &ExperimentConfig) -> Option<f64> {
    let mut schedule = make_schedule(cfg.update_mode(), cfg.n, cfg.m, 1).ok()?;
    let stats = estimate_stats_ar(
        &cfg.ar_model(),
        cfg.n,
        &mut schedule,
        StatsOptions {
            samples: 20_000,
            min_samples: 10_000,
        },
        RngStream::new(cfg.seed).split(STREAM_STATS),
    )
    .ok()?;
    mean_stability_bound(&stats).ok()
}

/// Theory-side outputs: predicted curves, steady-state values by the three
/// methods, and both stability bounds.
#[derive(Debug, Clone)]
pub struct TheoryOutput {
    pub records: Vec<LearningCurveRecord>,
    pub steady_exact: Option<SteadyStatePrediction>,
    pub steady_small_mu: SteadyStatePrediction,
    pub steady_variance_relation: Option<SteadyStatePrediction>,
    pub mean_bound: f64,
    pub ms_bound: StabilityBound,
    pub trace_c_u: f64,
    pub trace_c_u_m: f64,
    pub circularity: f64,
    pub warnings: Vec<String>,
}

/// Estimates statistics and operators for the configured experiment.
pub fn experiment_theory_inputs(
    cfg: &ExperimentConfig,
    stats_samples: usize,
    operator_samples: usize,
) -> HarnessResult<(SecondOrderStats, VarianceRelationOperators)> {
    let base = RngStream::new(cfg.seed);
    let sched_seed = base.split(STREAM_SCHED).next_u64();
    let model = cfg.ar_model();
    let mut sched_stats = make_schedule(cfg.update_mode(), cfg.n, cfg.m, sched_seed)?;
    let stats = estimate_stats_ar(
        &model,
        cfg.n,
        &mut sched_stats,
        StatsOptions {
            samples: stats_samples,
            min_samples: 10_000.min(stats_samples),
        },
        base.split(STREAM_STATS),
    )?;
    let sched_ops = make_schedule(cfg.update_mode(), cfg.n, cfg.m, sched_seed ^ 0x9E37)?;
    let ops = build_operators(
        cfg.mu,
        &stats,
        &sched_ops,
        &model,
        OperatorOptions {
            samples: operator_samples,
            ..OperatorOptions::default()
        },
        &base.split(STREAM_OPERATORS),
    )?;
    Ok((stats, ops))
}

/// Computes the full set of theoretical predictions for a config.
///
/// Fails with [`HarnessError::UnstableStepSize`] when μ is at or beyond the
/// mean-square bound; callers turn that into an instability report.
pub fn run_theory(cfg: &ExperimentConfig) -> HarnessResult<TheoryOutput> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    let (stats, ops) = experiment_theory_inputs(cfg, 100_000, 100_000)?;

    let mean_bound = mean_stability_bound(&stats)?;
    let ms_bound = mean_square_stability_bound(&ops)?;
    warnings.extend(ms_bound.warnings.iter().cloned());

    if cfg.mu >= ms_bound.bound {
        return Err(HarnessError::UnstableStepSize {
            mu: cfg.mu,
            bound: ms_bound.bound,
            mean_bound,
        });
    }

    let steady_exact = match emse_steady_exact(cfg.mu, cfg.sigma_v2, &stats, None) {
        Ok(p) => Some(p),
        Err(e) => {
            warnings.push(format!("exact-energy steady state unavailable: {e}"));
            None
        }
    };
    let steady_small_mu = emse_steady_small_mu(cfg.mu, cfg.sigma_v2, &stats);
    if let Some(w) = &steady_small_mu.warning {
        warnings.push(w.clone());
    }
    let steady_variance_relation = if cfg.mu > 0.0 {
        match emse_steady_variance_relation(cfg.mu, cfg.sigma_v2, &ops, &stats.c_z) {
            Ok(p) => Some(p),
            Err(e) => {
                warnings.push(format!("variance-relation steady state unavailable: {e}"));
                None
            }
        }
    } else {
        None
    };

    let plant = experiment_plant(cfg);
    let points = learning_curves(
        cfg.mu,
        cfg.sigma_v2,
        &plant.stacked(),
        &ops,
        &stats.c_z,
        cfg.horizon.saturating_sub(1),
    )?;
    let records: Vec<LearningCurveRecord> = points
        .iter()
        .map(|p| LearningCurveRecord::new(p.iteration, p.emse, p.msd, CurveSource::Theory, 1))
        .collect();

    Ok(TheoryOutput {
        records,
        steady_exact,
        steady_small_mu,
        steady_variance_relation,
        mean_bound,
        ms_bound,
        trace_c_u: stats.trace_c_u(),
        trace_c_u_m: stats.trace_c_u_m(),
        circularity: stats.circularity_measure(),
        warnings,
    })
}

/// One joint row of a theory/simulation overlay.
#[derive(Debug, Clone, Copy)]
pub struct CompareRow {
    pub iteration: usize,
    pub sim_emse_db: f64,
    pub theory_emse_db: f64,
    pub emse_dev_db: f64,
    pub sim_msd_db: f64,
    pub theory_msd_db: f64,
    pub msd_dev_db: f64,
}

#[derive(Debug)]
pub struct CompareOutput {
    pub sim: MonteCarloOutput,
    pub theory: TheoryOutput,
    pub rows: Vec<CompareRow>,
    /// Maximum per-iteration deviations after the burn-in window.
    pub max_emse_dev_db: f64,
    pub max_msd_dev_db: f64,
    pub burn_in: usize,
    pub steady_emse_dev_db: f64,
}

/// Builds overlay rows from two curves of equal length.
pub fn overlay_rows(
    sim: &[LearningCurveRecord],
    theory: &[LearningCurveRecord],
) -> Vec<CompareRow> {
    sim.iter()
        .zip(theory.iter())
        .map(|(s, t)| CompareRow {
            iteration: s.iteration,
            sim_emse_db: s.emse_db,
            theory_emse_db: t.emse_db,
            emse_dev_db: (s.emse_db - t.emse_db).abs(),
            sim_msd_db: s.msd_db,
            theory_msd_db: t.msd_db,
            msd_dev_db: (s.msd_db - t.msd_db).abs(),
        })
        .collect()
}

/// Runs simulation and theory for the same config and joins them.
///
/// Requires zero weight initialization: the learning-curve recursion is
/// derived from `w(0) = 0`, so a random-init overlay would be comparing
/// different experiments.
pub fn run_compare(cfg: &ExperimentConfig) -> HarnessResult<CompareOutput> {
    if cfg.init != InitMode::Zero {
        return Err(HarnessError::Config(
            "compare requires init = \"zero\" (the theoretical curves assume zero-initialized weights)"
                .into(),
        ));
    }
    let sim = run_monte_carlo(cfg)?;
    let theory = run_theory(cfg)?;
    let rows = overlay_rows(&sim.records, &theory.records);
    let burn_in = 10.min(rows.len());
    let max_emse_dev_db = rows[burn_in..]
        .iter()
        .map(|r| r.emse_dev_db)
        .fold(0.0, f64::max);
    let max_msd_dev_db = rows[burn_in..]
        .iter()
        .map(|r| r.msd_dev_db)
        .fold(0.0, f64::max);
    let theory_steady = steady_state_mean(
        &theory.records.iter().map(|r| r.emse_linear).collect::<Vec<_>>(),
        cfg.steady_frac,
    );
    let steady_emse_dev_db = (to_db(sim.steady_emse) - to_db(theory_steady)).abs();
    Ok(CompareOutput {
        sim,
        theory,
        rows,
        max_emse_dev_db,
        max_msd_dev_db,
        burn_in,
        steady_emse_dev_db,
    })
}

/// First iteration at which the smoothed curve drops to `threshold` (a
/// linear EMSE level), using a trailing moving average to suppress
/// Monte-Carlo noise.
pub fn iterations_to_threshold(curve: &[f64], threshold: f64, smooth_window: usize) -> Option<usize> {
    let w = smooth_window.max(1);
    let mut acc = 0.0;
    for (i, &v) in curve.iter().enumerate() {
        acc += v;
        if i >= w {
            acc -= curve[i - w];
        }
        let len = (i + 1).min(w) as f64;
        if acc / len <= threshold {
            return Some(i);
        }
    }
    None
}

/// Iterations for the averaged EMSE curve to come within `margin_db` of its
/// steady-state level.
pub fn convergence_iterations(
    records: &[LearningCurveRecord],
    steady_frac: f64,
    margin_db: f64,
) -> Option<usize> {
    let curve: Vec<f64> = records.iter().map(|r| r.emse_linear).collect();
    let steady = steady_state_mean(&curve, steady_frac);
    let threshold = steady * 10f64.powf(margin_db / 10.0);
    iterations_to_threshold(&curve, threshold, 25)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            n: 2,
            m: 2,
            mode: ModeKey::Full,
            mu: 0.05,
            trials: 8,
            horizon: 400,
            seed: 42,
            sigma_v2: 0.01,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn zero_step_size_keeps_msd_at_plant_power() {
        let cfg = ExperimentConfig {
            mu: 0.0,
            trials: 3,
            horizon: 50,
            ..tiny_config()
        };
        let plant = experiment_plant(&cfg);
        let out = run_monte_carlo(&cfg).unwrap();
        let w_norm = plant.stacked().norm_sq();
        for r in &out.records {
            assert!((r.msd_linear - w_norm).abs() < 1e-12 * w_norm);
        }
    }

    #[test]
    fn noiseless_full_update_identifies_plant() {
        let cfg = ExperimentConfig {
            sigma_v2: 0.0,
            mu: 0.08,
            horizon: 12_000,
            trials: 4,
            ..tiny_config()
        };
        let out = run_monte_carlo(&cfg).unwrap();
        assert!(out.divergent.is_empty());
        assert!(
            out.steady_emse < 1e-10,
            "steady EMSE {} should vanish without noise",
            out.steady_emse
        );
    }

    #[test]
    fn reruns_are_bitwise_identical() {
        let cfg = tiny_config();
        let a = run_monte_carlo(&cfg).unwrap();
        let b = run_monte_carlo(&cfg).unwrap();
        assert_eq!(a.records.len(), b.records.len());
        for (x, y) in a.records.iter().zip(b.records.iter()) {
            assert_eq!(x.emse_linear.to_bits(), y.emse_linear.to_bits());
            assert_eq!(x.msd_linear.to_bits(), y.msd_linear.to_bits());
        }
    }

    #[test]
    fn overlay_of_a_run_against_itself_has_zero_deviation() {
        let cfg = tiny_config();
        let out = run_monte_carlo(&cfg).unwrap();
        let rows = overlay_rows(&out.records, &out.records);
        for r in rows {
            assert_eq!(r.emse_dev_db, 0.0);
            assert_eq!(r.msd_dev_db, 0.0);
        }
    }

    #[test]
    fn compare_rejects_random_init() {
        let cfg = ExperimentConfig {
            init: InitMode::Random,
            ..tiny_config()
        };
        assert!(matches!(
            run_compare(&cfg),
            Err(HarnessError::Config(_))
        ));
    }

    #[test]
    fn threshold_crossing_on_monotone_curve() {
        let curve: Vec<f64> = (0..100).map(|i| 100.0 * 0.9f64.powi(i)).collect();
        let hit = iterations_to_threshold(&curve, 10.0, 1).unwrap();
        assert_eq!(hit, 22); // 100·0.9^22 ≈ 9.85
    }
}
