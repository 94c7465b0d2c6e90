//! Regularized risk estimators and their exact infimum thresholds.
//!
//! Both estimators have the form
//!
//! ```text
//! R(λ) = (w · Σ_i ℓ_i(λ) + B) / n
//! ```
//!
//! with `w = 1, n = N_val + 1` for validation-based calibration and
//! `w = K/N, n = K + 1` for `K`-fold cross-validation. The `+B` term is the
//! dummy example (or dummy fold) carrying the maximal loss. `R` is a
//! nonincreasing right-continuous step function, so
//! `inf { λ : R(λ) ≤ α }` is either `-∞`, one of the breakpoints, or `+∞`
//! when even the full label set misses the target.

use crate::error::{CrcError, Result};
use crate::exact::{rational, target_rational, to_f64, ExactSum, Weight};
use crate::loss::{LossCurve, LossSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

/// Calibrated threshold. `lambda` is `+∞` exactly when `feasible` is false.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub lambda: f64,
    pub feasible: bool,
    /// Estimator value at `lambda` (at the terminal values when infeasible).
    pub risk_at_lambda: f64,
}

/// Loss curves sharing one estimator weight.
#[derive(Debug, Clone)]
pub struct CalibrationBatch {
    pub curves: Vec<LossCurve>,
    pub weight: Weight,
}

impl CalibrationBatch {
    /// Weight 1, as used by validation-based calibration.
    pub fn unweighted(curves: Vec<LossCurve>) -> Self {
        CalibrationBatch { curves, weight: Weight::one() }
    }

    pub fn weighted(curves: Vec<LossCurve>, weight: Weight) -> Self {
        CalibrationBatch { curves, weight }
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }
}

/// Infimum of `{ λ : (Σ_g w_g Σ_{c ∈ g} c(λ) + regularizer) / normalizer ≤ alpha }`.
///
/// Drops at the same `λ` from different curves are applied together before
/// the constraint is tested.
pub fn infimum_threshold(
    groups: &[(&Weight, &[LossCurve])],
    regularizer: f64,
    normalizer: u64,
    alpha: f64,
) -> ThresholdResult {
    assert!(normalizer > 0, "normalizer must be positive");
    let norm = BigRational::from_integer(BigInt::from(normalizer));
    let target = target_rational(alpha) * &norm;
    let estimate = |sum: &ExactSum| to_f64(&(sum.value() / &norm));

    let mut sum = ExactSum::zero();
    sum.add_f64(regularizer);
    let mut events: Vec<(f64, usize, usize, usize)> = Vec::new();
    for (g, (weight, curves)) in groups.iter().enumerate() {
        for (c, curve) in curves.iter().enumerate() {
            sum.add_weighted(weight, curve.initial_value());
            for s in 0..curve.steps().len() {
                events.push((curve.steps()[s].0, g, c, s));
            }
        }
    }
    if *sum.value() <= target {
        return ThresholdResult { lambda: f64::NEG_INFINITY, feasible: true, risk_at_lambda: estimate(&sum) };
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut i = 0;
    while i < events.len() {
        let lambda = events[i].0;
        while i < events.len() && events[i].0 == lambda {
            let (_, g, c, s) = events[i];
            let curve = &groups[g].1[c];
            let before = if s == 0 { curve.initial_value() } else { curve.steps()[s - 1].1 };
            let drop = rational(before) - rational(curve.steps()[s].1);
            sum.sub_weighted(groups[g].0, &drop);
            i += 1;
        }
        if *sum.value() <= target {
            return ThresholdResult { lambda, feasible: true, risk_at_lambda: estimate(&sum) };
        }
    }
    ThresholdResult { lambda: f64::INFINITY, feasible: false, risk_at_lambda: estimate(&sum) }
}

fn check_curves<'a>(curves: impl IntoIterator<Item = &'a LossCurve>, spec: &LossSpec) -> Result<()> {
    curves.into_iter().try_for_each(|c| c.check_bounds(spec))
}

/// Validation-based threshold: `inf { λ : (Σ_i ℓ_i(λ) + B) / (N_val + 1) ≤ α }`.
pub fn vb_threshold(batch: &CalibrationBatch, spec: &LossSpec) -> Result<ThresholdResult> {
    check_curves(&batch.curves, spec)?;
    Ok(infimum_threshold(
        &[(&batch.weight, &batch.curves)],
        spec.upper(),
        batch.len() as u64 + 1,
        spec.alpha(),
    ))
}

/// Smallest `K` with `K ≥ B/(α − b) − 1`, or `None` when `α = b`.
pub fn min_folds(spec: &LossSpec) -> Option<usize> {
    let gap = target_rational(spec.alpha()) - rational(spec.lower());
    if !gap.is_positive() {
        return None;
    }
    let required = (rational(spec.upper()) / gap - BigRational::one()).ceil();
    Some(required.to_integer().to_usize().unwrap_or(usize::MAX).max(1))
}

/// Fold-count condition under which cross-validation calibration controls the risk.
pub fn check_fold_condition(spec: &LossSpec, k: usize) -> Result<()> {
    match min_folds(spec) {
        None => Err(CrcError::InvalidSpec(
            "alpha equals the loss lower bound; no fold count satisfies the condition".into(),
        )),
        Some(min_k) if k < min_k => Err(CrcError::FoldCondition { k, min_k }),
        Some(_) => Ok(()),
    }
}

/// Cross-validation threshold:
/// `inf { λ : ((K/N) Σ_k Σ_j ℓ_{k,j}(λ) + B) / (K + 1) ≤ α }`.
///
/// `fold_curves[k]` holds the curves of the examples in fold `k`, each
/// computed with the model trained without fold `k`.
pub fn cv_threshold(
    fold_curves: &[Vec<LossCurve>],
    spec: &LossSpec,
    n_total: usize,
    n_folds: usize,
) -> Result<ThresholdResult> {
    if n_folds == 0 || !n_total.is_multiple_of(n_folds) {
        return Err(CrcError::InvalidFolds(format!("N = {n_total} is not divisible by K = {n_folds}")));
    }
    if fold_curves.len() != n_folds {
        return Err(CrcError::InvalidFolds(format!(
            "expected {n_folds} folds, got {}",
            fold_curves.len()
        )));
    }
    let fold_size = n_total / n_folds;
    if let Some((k, f)) = fold_curves.iter().enumerate().find(|(_, f)| f.len() != fold_size) {
        return Err(CrcError::InvalidFolds(format!(
            "fold {k} has {} examples, expected N/K = {fold_size}",
            f.len()
        )));
    }
    check_fold_condition(spec, n_folds)?;
    check_curves(fold_curves.iter().flatten(), spec)?;

    let weight = Weight::ratio(n_folds as u64, n_total as u64);
    let flat: Vec<LossCurve> = fold_curves.iter().flatten().cloned().collect();
    Ok(infimum_threshold(&[(&weight, &flat)], spec.upper(), n_folds as u64 + 1, spec.alpha()))
}
