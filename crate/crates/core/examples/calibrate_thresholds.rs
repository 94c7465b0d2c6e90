//! Validation-based and cross-validation thresholds on hand-built loss curves.
//!
//! Run with `cargo run --example calibrate_thresholds`.

use cvcrc::{check_fold_condition, cv_threshold, min_folds, vb_threshold, CalibrationBatch, LossCurve, LossSpec};

fn main() -> cvcrc::Result<()> {
    // miscoverage: loss 1 until the threshold reaches the example's score
    let scores = [0.8, 2.4, 1.1, 3.0, 0.3, 1.7, 2.2, 0.9, 1.4];
    let curves = scores.iter().map(|&s| LossCurve::miscoverage(s)).collect::<cvcrc::Result<Vec<_>>>()?;

    let spec = LossSpec::unit(0.2)?;
    let vb = vb_threshold(&CalibrationBatch::unweighted(curves.clone()), &spec)?;
    println!("VB  alpha=0.2: lambda={} estimate={:.4}", vb.lambda, vb.risk_at_lambda);

    // a graded loss: fraction of three targets left uncovered
    let graded = LossCurve::fraction_uncovered(&[0.5, 1.5, 2.5])?;
    println!("graded curve at 0, 1, 2, 3: {:?}", [0.0, 1.0, 2.0, 3.0].map(|l| graded.evaluate(l)));

    // cross-validation with K = 3 folds of 3 examples each
    let folds: Vec<Vec<LossCurve>> = curves.chunks(3).map(<[LossCurve]>::to_vec).collect();
    let spec = LossSpec::unit(0.3)?;
    println!("fewest folds allowed at alpha=0.3: {:?}", min_folds(&spec));
    check_fold_condition(&spec, 3)?;
    let cv = cv_threshold(&folds, &spec, 9, 3)?;
    println!("CV  alpha=0.3, K=3: lambda={} estimate={:.4}", cv.lambda, cv.risk_at_lambda);

    // too few folds for the target is rejected
    let strict = LossSpec::unit(0.1)?;
    match cv_threshold(&folds, &strict, 9, 3) {
        Err(e) => println!("alpha=0.1, K=3: {e}"),
        Ok(r) => println!("unexpected threshold {}", r.lambda),
    }
    Ok(())
}
