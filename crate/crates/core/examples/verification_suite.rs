//! Independent oracles: brute-force thresholds, the leave-two-folds-out bound
//! on a small regression instance, and the full randomized property suite.
//!
//! Run with `cargo run --release --example verification_suite`.

use cvcrc::regression::{sample_dataset, sample_task, Example, LeastSquaresTrainer, RegressionConfig};
use cvcrc::verify::{brute_force_threshold, cv_threshold_with, l2o_threshold, run_suite, AugmentedDataset, VerifyConfig};
use cvcrc::{vb_threshold, CalibrationBatch, LossCurve, LossSpec, Weight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cvcrc::Result<()> {
    let curves: Vec<LossCurve> = [3.0, 1.0, 2.0].iter().map(|&s| LossCurve::miscoverage(s)).collect::<cvcrc::Result<_>>()?;
    let spec = LossSpec::unit(0.5)?;
    let fast = vb_threshold(&CalibrationBatch::unweighted(curves.clone()), &spec)?;
    let w = Weight::one();
    let terms: Vec<_> = curves.iter().map(|c| (&w, c)).collect();
    println!("sweep {} vs brute force {}", fast.lambda, brute_force_threshold(&terms, 1.0, 0.5, 4));

    // K = 3 data folds plus one held-out fold, two examples each
    let cfg = RegressionConfig { d: 3, m: 2, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let phi = sample_task(&cfg, &mut rng);
    let examples = sample_dataset(&cfg, &phi, 8, &mut rng).examples();
    let folds: Vec<Vec<Example>> = examples.chunks(2).map(<[Example]>::to_vec).collect();
    let aug = AugmentedDataset::from_folds(folds.clone())?;
    let spec = LossSpec::unit(0.4)?;
    let l2o = l2o_threshold(&aug, &spec, &LeastSquaresTrainer)?;
    let cv = cv_threshold_with(&folds[..3], &spec, &LeastSquaresTrainer)?;
    println!("leave-two-folds-out {} <= cross-validation {}", l2o.lambda, cv.lambda);

    for o in run_suite(&VerifyConfig { trials: 100, ..Default::default() })? {
        println!("{} {} ({} instances)", if o.passed() { "PASS" } else { "FAIL" }, o.name, o.checked);
    }
    Ok(())
}
