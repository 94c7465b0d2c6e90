//! Leave-two-folds-out (L2O) risk and threshold on a data set augmented
//! with one extra fold of test points.

use std::collections::HashMap;

use crate::error::{CrcError, Result};
use crate::exact::Weight;
use crate::loss::{LossCurve, LossSpec};
use crate::threshold::{check_fold_condition, infimum_threshold, ThresholdResult};

/// A permutation-invariant training routine together with the per-example
/// loss curve of the single-model set it induces.
pub trait FoldTrainer<E> {
    type Model;

    fn train(&self, examples: &[&E]) -> Result<Self::Model>;

    fn loss_curve(&self, model: &Self::Model, example: &E) -> Result<LossCurve>;
}

/// `K` data folds followed by one test fold, all of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedDataset<E> {
    folds: Vec<Vec<E>>,
}

impl<E: Clone> AugmentedDataset<E> {
    pub fn new(data_folds: Vec<Vec<E>>, test_fold: Vec<E>) -> Result<Self> {
        let mut folds = data_folds;
        folds.push(test_fold);
        Self::from_folds(folds)
    }

    /// All `K + 1` folds, the test fold last.
    pub fn from_folds(folds: Vec<Vec<E>>) -> Result<Self> {
        if folds.len() < 2 {
            return Err(CrcError::InvalidFolds(format!("need at least 2 folds, got {}", folds.len())));
        }
        let size = folds[0].len();
        if size == 0 || folds.iter().any(|f| f.len() != size) {
            return Err(CrcError::InvalidFolds("all folds must be nonempty and of equal size".into()));
        }
        Ok(AugmentedDataset { folds })
    }

    pub fn folds(&self) -> &[Vec<E>] {
        &self.folds
    }

    /// Number of data folds `K`.
    pub fn n_data_folds(&self) -> usize {
        self.folds.len() - 1
    }

    pub fn fold_size(&self) -> usize {
        self.folds[0].len()
    }

    /// Data-set size `N = K · N/K`.
    pub fn n_data(&self) -> usize {
        self.n_data_folds() * self.fold_size()
    }

    /// Folds reordered so that new fold `i` is old fold `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.folds.len()];
        if perm.len() != self.folds.len() || perm.iter().any(|&p| p >= seen.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(CrcError::InvalidFolds(format!("{perm:?} is not a permutation of the folds")));
        }
        Ok(AugmentedDataset { folds: perm.iter().map(|&p| self.folds[p].clone()).collect() })
    }
}

/// One model per unordered fold pair, trained on the remaining folds in
/// fold order. Built once, then read-only.
fn train_pair_models<E, T: FoldTrainer<E>>(aug: &AugmentedDataset<E>, trainer: &T) -> Result<HashMap<(usize, usize), T::Model>> {
    let total = aug.folds.len();
    let mut cache = HashMap::with_capacity(total * (total - 1) / 2);
    for a in 0..total {
        for b in a + 1..total {
            let rest: Vec<&E> = aug
                .folds
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != a && *i != b)
                .flat_map(|(_, f)| f.iter())
                .collect();
            cache.insert((a, b), trainer.train(&rest)?);
        }
    }
    Ok(cache)
}

/// For every example `(k, j)` of the augmented set, the pointwise minimum
/// over `k' ≠ k` of its loss curve under the model trained without folds
/// `k` and `k'`. Returned fold-major.
pub fn l2o_curves<E: Clone, T: FoldTrainer<E>>(aug: &AugmentedDataset<E>, trainer: &T) -> Result<Vec<LossCurve>> {
    let models = train_pair_models(aug, trainer)?;
    let total = aug.folds.len();
    let mut out = Vec::with_capacity(total * aug.fold_size());
    for (k, fold) in aug.folds.iter().enumerate() {
        for example in fold {
            let curves = (0..total)
                .filter(|&kp| kp != k)
                .map(|kp| trainer.loss_curve(&models[&(k.min(kp), k.max(kp))], example))
                .collect::<Result<Vec<_>>>()?;
            out.push(LossCurve::pointwise_min(&curves).expect("at least one other fold"));
        }
    }
    Ok(out)
}

/// `(1/(K+1)) Σ_k (K/N) Σ_j min_{k'≠k} ℓ(ỹ_k[j], Γ_λ(x̃_k[j] | D̃ without k, k'))`.
pub fn l2o_risk<E: Clone, T: FoldTrainer<E>>(lambda: f64, aug: &AugmentedDataset<E>, trainer: &T) -> Result<f64> {
    let curves = l2o_curves(aug, trainer)?;
    let k = aug.n_data_folds() as f64;
    let sum: f64 = curves.iter().map(|c| c.evaluate(lambda)).sum();
    Ok(sum * k / aug.n_data() as f64 / (k + 1.0))
}

/// `inf { λ : l2o_risk(λ) ≤ α }`, computed exactly.
pub fn l2o_threshold<E: Clone, T: FoldTrainer<E>>(aug: &AugmentedDataset<E>, spec: &LossSpec, trainer: &T) -> Result<ThresholdResult> {
    let k = aug.n_data_folds();
    check_fold_condition(spec, k)?;
    let curves = l2o_curves(aug, trainer)?;
    for c in &curves {
        c.check_bounds(spec)?;
    }
    let weight = Weight::ratio(k as u64, aug.n_data() as u64);
    Ok(infimum_threshold(&[(&weight, &curves)], 0.0, k as u64 + 1, spec.alpha()))
}

/// Whether the L2O threshold is unchanged when the folds are reordered by `perm`.
pub fn fold_permutation_check<E: Clone, T: FoldTrainer<E>>(
    aug: &AugmentedDataset<E>,
    perm: &[usize],
    spec: &LossSpec,
    trainer: &T,
) -> Result<bool> {
    let base = l2o_threshold(aug, spec, trainer)?;
    let moved = l2o_threshold(&aug.permuted(perm)?, spec, trainer)?;
    Ok(base.lambda == moved.lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Predicts the mean label of its training set (0 when empty); scalar examples `(x, y)`.
    struct MeanTrainer;

    impl FoldTrainer<f64> for MeanTrainer {
        type Model = f64;

        fn train(&self, examples: &[&f64]) -> Result<f64> {
            if examples.is_empty() {
                return Ok(0.0);
            }
            Ok(examples.iter().copied().sum::<f64>() / examples.len() as f64)
        }

        fn loss_curve(&self, model: &f64, example: &f64) -> Result<LossCurve> {
            LossCurve::miscoverage(2.0 * (example - model).abs())
        }
    }

    #[test]
    fn single_data_fold_uses_the_other_fold_only() {
        // K = 1: each fold's only L2O model is trained on nothing, i.e. predicts 0.
        let aug = AugmentedDataset::new(vec![vec![1.0, -3.0]], vec![2.0, 0.5]).unwrap();
        let lambda = 2.5;
        let direct: f64 = [1.0f64, -3.0, 2.0, 0.5].iter().map(|y| f64::from(2.0 * y.abs() > lambda)).sum();
        let expect = direct * (1.0 / 2.0) / 2.0;
        assert_eq!(l2o_risk(lambda, &aug, &MeanTrainer).unwrap(), expect);
    }

    #[test]
    fn infinite_threshold_covers_everything() {
        let aug = AugmentedDataset::new(vec![vec![1.0], vec![4.0]], vec![-2.0]).unwrap();
        assert_eq!(l2o_risk(f64::INFINITY, &aug, &MeanTrainer).unwrap(), 0.0);
    }

    #[test]
    fn constant_lower_bound_losses_give_minus_infinity() {
        struct Zero;
        impl FoldTrainer<f64> for Zero {
            type Model = ();
            fn train(&self, _: &[&f64]) -> Result<()> {
                Ok(())
            }
            fn loss_curve(&self, _: &(), _: &f64) -> Result<LossCurve> {
                Ok(LossCurve::constant(0.0))
            }
        }
        let aug = AugmentedDataset::new(vec![vec![1.0], vec![2.0]], vec![3.0]).unwrap();
        let spec = LossSpec::unit(0.5).unwrap();
        assert_eq!(l2o_threshold(&aug, &spec, &Zero).unwrap().lambda, f64::NEG_INFINITY);
    }

    #[test]
    fn permutations_are_validated() {
        let aug = AugmentedDataset::new(vec![vec![1.0], vec![2.0]], vec![3.0]).unwrap();
        assert!(aug.permuted(&[0, 0, 1]).is_err());
        assert!(aug.permuted(&[0, 1]).is_err());
        assert_eq!(aug.permuted(&[2, 0, 1]).unwrap().folds()[0], vec![3.0]);
        let spec = LossSpec::unit(0.5).unwrap();
        assert!(fold_permutation_check(&aug, &[0, 1, 2], &spec, &MeanTrainer).unwrap());
        assert!(fold_permutation_check(&aug, &[1, 0, 2], &spec, &MeanTrainer).unwrap());
    }

    #[test]
    fn unequal_folds_rejected() {
        assert!(AugmentedDataset::new(vec![vec![1.0, 2.0]], vec![3.0]).is_err());
        assert!(AugmentedDataset::<f64>::from_folds(vec![vec![1.0]]).is_err());
    }
}
