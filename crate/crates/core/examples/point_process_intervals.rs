//! Multi-step event-time intervals for a Hawkes process: validation-based
//! calibration against leave-one-out (K = N) cross-validation.
//!
//! Run with `cargo run --release --example point_process_intervals`.

use cvcrc::experiment::summarize;
use cvcrc::tpp::{fit_median_predictor, rollout_predict, run_tpp_experiment, tpp_loss_curve, windows, TppConfig};

fn main() -> cvcrc::Result<()> {
    // one example by hand: three observed events, two to predict
    let ex = &windows(&[0.0, 1.0, 3.0, 4.0, 5.5], 3, 2)[0];
    let pred = fit_median_predictor(&[ex])?;
    let forecast = rollout_predict(&pred, &ex.observed, 2);
    let curve = tpp_loss_curve(&ex.targets, std::slice::from_ref(&forecast), 1.2)?;
    println!("forecast {forecast:?} for targets {:?}; loss curve breakpoints {:?}", ex.targets, curve.breakpoints().collect::<Vec<_>>());

    let mut records = Vec::new();
    for n in [10, 20] {
        let cfg = TppConfig { n_train_total: n, k_equals_n: true, n_runs: 20, n_test: 200, seed: 3, ..Default::default() };
        records.extend(run_tpp_experiment(&cfg)?);
    }
    for s in summarize(&records) {
        println!(
            "{:<5} N={:>2}: risk {:.4} ± {:.4} (target {:.4}), inefficiency {:.2} ± {:.2}",
            s.scheme.label(),
            s.n,
            s.mean_risk,
            s.se_risk,
            1.0 / 6.0,
            s.mean_inefficiency,
            s.se_inefficiency
        );
    }
    Ok(())
}
