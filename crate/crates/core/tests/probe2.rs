// Temporary calibration probe (removed before finalizing).
use pu_aclms::harness::*;
use pu_aclms::theory::*;

#[test]
fn probe_variance_relation() {
    let cfg = ExperimentConfig {
        n: 4,
        m: 2,
        mode: ModeKey::Stochastic,
        mu: 0.02,
        trials: 10,
        horizon: 100,
        seed: 7,
        sigma_v2: 0.01,
        ..ExperimentConfig::default()
    };
    let (stats, ops) = experiment_theory_inputs(&cfg, 100_000, 100_000).unwrap();
    match emse_steady_variance_relation(cfg.mu, cfg.sigma_v2, &ops, &stats.c_z) {
        Ok(p) => println!("varrel OK: emse={:.6e} msd={:?}", p.emse, p.msd),
        Err(e) => println!("varrel ERR: {e}"),
    }
    let out = run_theory(&cfg).unwrap();
    println!("warnings: {:#?}", out.warnings);
}

#[test]
fn probe_max_dev_location() {
    let cfg = ExperimentConfig {
        n: 4,
        m: 4,
        mode: ModeKey::Full,
        mu: 0.02,
        trials: 500,
        horizon: 3000,
        seed: 7,
        sigma_v2: 0.01,
        ..ExperimentConfig::default()
    };
    let out = run_compare(&cfg).unwrap();
    let mut worst: Vec<(f64, usize)> = out.rows[10..]
        .iter()
        .map(|r| (r.emse_dev_db, r.iteration))
        .collect();
    worst.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    println!(
        "full m=4 500 trials: max_emse_dev={:.3} max_msd_dev={:.3}",
        out.max_emse_dev_db, out.max_msd_dev_db
    );
    println!("worst 10: {:?}", &worst[..10]);
}
