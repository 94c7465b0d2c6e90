//! Monte Carlo risk control under deliberately poor point predictors.

use cvcrc::experiment::summarize;
use cvcrc::tpp::{run_tpp_experiment, TppConfig};

#[test]
fn risk_control_survives_a_mis_scaled_predictor() {
    for scale in [10.0, 0.1] {
        let cfg = TppConfig {
            n_train_total: 20,
            k_equals_n: true,
            n_runs: 20,
            n_test: 200,
            predictor_scale: scale,
            seed: 4,
            ..Default::default()
        };
        let records = run_tpp_experiment(&cfg).unwrap();
        for s in summarize(&records) {
            assert!(
                s.mean_risk <= cfg.alpha + 3.0 * s.se_risk,
                "scale {scale}, {}: risk {} ± {}",
                s.scheme,
                s.mean_risk,
                s.se_risk
            );
        }
    }
}

/// The pooled median gap sits below the mean gap of a bursty process, so a
/// moderate upward rescaling can even help; two orders of magnitude cannot.
#[test]
fn grossly_mis_scaled_predictor_widens_intervals() {
    let base = TppConfig { n_train_total: 10, k_equals_n: true, n_runs: 10, n_test: 100, seed: 4, ..Default::default() };
    let ineff = |scale: f64| {
        let records = run_tpp_experiment(&TppConfig { predictor_scale: scale, ..base.clone() }).unwrap();
        summarize(&records).iter().map(|s| s.mean_inefficiency).sum::<f64>()
    };
    assert!(ineff(100.0) > ineff(1.0));
}
