// Temporary calibration probe (removed before finalizing).
use pu_aclms::harness::*;

fn probe(mode: ModeKey, m: usize, mu: f64) {
    let cfg = ExperimentConfig {
        n: 4,
        m,
        mode,
        mu,
        trials: 200,
        horizon: 3000,
        seed: 7,
        sigma_v2: 0.01,
        ..ExperimentConfig::default()
    };
    let out = run_compare(&cfg).unwrap();
    println!(
        "mode={mode:?} m={m} mu={mu}: max_emse_dev={:.3} dB max_msd_dev={:.3} dB steady_dev={:.3} dB",
        out.max_emse_dev_db, out.max_msd_dev_db, out.steady_emse_dev_db
    );
    println!(
        "  mean_bound={:.4} ms_bound={:.4} (piq {:.4}, g {:.4}) warnings={:?}",
        out.theory.mean_bound,
        out.theory.ms_bound.bound,
        out.theory.ms_bound.p_inv_q_branch,
        out.theory.ms_bound.g_branch,
        out.theory.ms_bound.warnings
    );
    println!(
        "  steady: sim={:.4e} exact={:.4e} small={:.4e} varrel={:.4e}",
        out.sim.steady_emse,
        out.theory.steady_exact.as_ref().map(|p| p.emse).unwrap_or(f64::NAN),
        out.theory.steady_small_mu.emse,
        out.theory.steady_variance_relation.as_ref().map(|p| p.emse).unwrap_or(f64::NAN),
    );
    // print a few sample rows
    for &i in &[0usize, 5, 20, 50, 100, 200, 400, 800, 1500, 2900] {
        let r = &out.rows[i];
        println!(
            "  it {:4}: sim {:7.3} th {:7.3} dev {:5.3} | msd sim {:7.3} th {:7.3} dev {:5.3}",
            r.iteration, r.sim_emse_db, r.theory_emse_db, r.emse_dev_db,
            r.sim_msd_db, r.theory_msd_db, r.msd_dev_db
        );
    }
}

#[test]
fn probe_agreement() {
    probe(ModeKey::Full, 4, 0.02);
    probe(ModeKey::Stochastic, 2, 0.02);
    probe(ModeKey::Sequential, 2, 0.02);
}
