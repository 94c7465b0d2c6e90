//! Small Monte Carlo run of the hierarchical Gaussian regression experiment,
//! comparing validation-based and 20-fold cross-validation calibration.
//!
//! Run with `cargo run --release --example vector_regression`.

use cvcrc::experiment::summarize;
use cvcrc::regression::{run_regression_experiment, RegressionConfig};

fn main() -> cvcrc::Result<()> {
    let mut records = Vec::new();
    for n in [40, 80] {
        let cfg = RegressionConfig { n_train_total: n, n_runs: 20, n_test: 100, seed: 1, ..Default::default() };
        records.extend(run_regression_experiment(&cfg)?);
    }
    println!("scheme  N   K  risk (± SE)       inefficiency (± SE)");
    for s in summarize(&records) {
        println!(
            "{:<6} {:>3} {:>2}  {:.4} ± {:.4}   {:>8.3} ± {:.3}",
            s.scheme.label(),
            s.n,
            s.k,
            s.mean_risk,
            s.se_risk,
            s.mean_inefficiency,
            s.se_inefficiency
        );
    }
    Ok(())
}
