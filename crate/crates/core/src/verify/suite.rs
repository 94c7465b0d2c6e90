//! Randomized property suite over the oracles, driven by a fixed seed.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{brute_force_threshold, jackknife_minmax_threshold, lemma1_expectation, lemma1_oracle, bag_decomposition};
use super::{fold_permutation_check, l2o_threshold, AugmentedDataset, FoldTrainer};
use crate::error::{CrcError, Result};
use crate::exact::Weight;
use crate::loss::{LossCurve, LossSpec};
use crate::regression::{sample_dataset, sample_task, Example, LeastSquaresTrainer, RegressionConfig};
use crate::threshold::{check_fold_condition, cv_threshold, vb_threshold, CalibrationBatch, ThresholdResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Instances for each oracle-equivalence check; the other checks scale with it.
    pub trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 20240118, trials: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    /// First failing instance, if any.
    pub detail: Option<String>,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }
}

struct Tally {
    name: &'static str,
    checked: usize,
    failures: usize,
    detail: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, checked: 0, failures: 0, detail: None }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.detail.is_none() {
                self.detail = Some(detail());
            }
        }
    }

    fn finish(self) -> PropertyOutcome {
        PropertyOutcome { name: self.name, checked: self.checked, failures: self.failures, detail: self.detail }
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Either a multiple of 1/16 (to provoke exact ties with the target) or uniform.
fn random_alpha<R: Rng>(rng: &mut R, lo: f64) -> f64 {
    loop {
        let a = if rng.random_bool(0.5) { rng.random_range(0..=16) as f64 / 16.0 } else { rng.random::<f64>() };
        if a >= lo && a <= 1.0 {
            return a;
        }
    }
}

/// Random unit-bounded curve with up to `max_steps` breakpoints, drawn either
/// on coarse grids (many ties across curves) or continuously.
pub(crate) fn random_curve<R: Rng>(rng: &mut R, max_steps: usize) -> LossCurve {
    let n = rng.random_range(0..=max_steps.min(8));
    let (mut lambdas, mut values): (Vec<f64>, Vec<f64>) = if rng.random_bool(0.5) {
        let l = rand::seq::index::sample(rng, 21, n).into_iter().map(|i| i as f64 / 2.0).collect();
        let v = rand::seq::index::sample(rng, 9, n + 1).into_iter().map(|i| i as f64 / 8.0).collect();
        (l, v)
    } else {
        ((0..n).map(|_| rng.random_range(-5.0..15.0)).collect(), (0..=n).map(|_| rng.random::<f64>()).collect())
    };
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    values.sort_by(|a, b| b.total_cmp(a));
    values.dedup();
    let steps: Vec<(f64, f64)> = lambdas.iter().copied().zip(values[1..].iter().copied()).collect();
    LossCurve::new(values[0], steps).expect("generated curve is valid")
}

fn oracle_equivalence_vb(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut rng = stream(cfg.seed, 1);
    let mut t = Tally::new("oracle equivalence (VB)");
    for _ in 0..cfg.trials {
        let n = rng.random_range(0..=30);
        let curves: Vec<LossCurve> = (0..n).map(|_| random_curve(&mut rng, 8)).collect();
        let spec = LossSpec::unit(random_alpha(&mut rng, 0.0))?;
        let fast = vb_threshold(&CalibrationBatch::unweighted(curves.clone()), &spec)?;
        let w = Weight::one();
        let terms: Vec<_> = curves.iter().map(|c| (&w, c)).collect();
        let slow = brute_force_threshold(&terms, 1.0, spec.alpha(), n as u64 + 1);
        t.check(fast.lambda == slow, || format!("n={n} alpha={} fast={} oracle={slow}", spec.alpha(), fast.lambda));
    }
    Ok(t.finish())
}

fn oracle_equivalence_cv(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut rng = stream(cfg.seed, 2);
    let mut t = Tally::new("oracle equivalence (CV)");
    for _ in 0..cfg.trials {
        let k = rng.random_range(2..=6);
        let size = rng.random_range(1..=5);
        let folds: Vec<Vec<LossCurve>> = (0..k).map(|_| (0..size).map(|_| random_curve(&mut rng, 8)).collect()).collect();
        let spec = loop {
            let s = LossSpec::unit(random_alpha(&mut rng, 1.0 / (k as f64 + 1.0)))?;
            if check_fold_condition(&s, k).is_ok() {
                break s;
            }
        };
        let fast = cv_threshold(&folds, &spec, k * size, k)?;
        let w = Weight::ratio(k as u64, (k * size) as u64);
        let terms: Vec<_> = folds.iter().flatten().map(|c| (&w, c)).collect();
        let slow = brute_force_threshold(&terms, 1.0, spec.alpha(), k as u64 + 1);
        t.check(fast.lambda == slow, || format!("K={k} N={} alpha={} fast={} oracle={slow}", k * size, spec.alpha(), fast.lambda));
    }
    Ok(t.finish())
}

/// Cross-validation threshold where fold `k` is scored by the model trained
/// on the other folds (concatenated in fold order).
pub fn cv_threshold_with<E, T: FoldTrainer<E>>(folds: &[Vec<E>], spec: &LossSpec, trainer: &T) -> Result<ThresholdResult> {
    let k = folds.len();
    let mut fold_curves = Vec::with_capacity(k);
    for i in 0..k {
        let rest: Vec<&E> = folds.iter().enumerate().filter(|(j, _)| *j != i).flat_map(|(_, f)| f.iter()).collect();
        let model = trainer.train(&rest)?;
        fold_curves.push(folds[i].iter().map(|e| trainer.loss_curve(&model, e)).collect::<Result<Vec<_>>>()?);
    }
    let n = folds.iter().map(Vec::len).sum();
    cv_threshold(&fold_curves, spec, n, k)
}

/// Random regression instance: `k` data folds plus one test fold of `size` examples.
pub(crate) fn regression_instance<R: Rng>(rng: &mut R, k: usize, size: usize, d: usize, m: usize) -> AugmentedDataset<Example> {
    let cfg = RegressionConfig { d, m, ..Default::default() };
    let phi = sample_task(&cfg, rng);
    let examples = sample_dataset(&cfg, &phi, (k + 1) * size, rng).examples();
    let folds: Vec<Vec<Example>> = examples.chunks(size).map(<[Example]>::to_vec).collect();
    AugmentedDataset::from_folds(folds).expect("equal folds")
}

fn l2o_lower_bound(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut rng = stream(cfg.seed, 3);
    let mut t = Tally::new("L2O threshold lower-bounds CV threshold");
    for _ in 0..(cfg.trials * 2 / 5).max(1) {
        let k = rng.random_range(2..=4);
        let size = rng.random_range(1..=12 / k);
        let (d, m) = (rng.random_range(1..=5), rng.random_range(1..=3));
        let aug = regression_instance(&mut rng, k, size, d, m);
        let lo = 1.0 / (k as f64 + 1.0);
        let spec = LossSpec::unit(lo + rng.random::<f64>() * (0.95 - lo))?;
        let l2o = l2o_threshold(&aug, &spec, &LeastSquaresTrainer)?;
        let cv = cv_threshold_with(&aug.folds()[..k], &spec, &LeastSquaresTrainer)?;
        t.check(l2o.lambda <= cv.lambda, || format!("K={k} size={size} d={d} m={m} l2o={} cv={}", l2o.lambda, cv.lambda));
    }
    Ok(t.finish())
}

fn l2o_permutation_invariance(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut rng = stream(cfg.seed, 4);
    let mut t = Tally::new("L2O threshold fold-permutation invariance");
    let instances = (cfg.trials / 50).max(1);
    for k in 2..=4usize {
        for _ in 0..instances {
            let size = rng.random_range(1..=3);
            let (d, m) = (rng.random_range(1..=5), rng.random_range(1..=3));
            let aug = regression_instance(&mut rng, k, size, d, m);
            let lo = 1.0 / (k as f64 + 1.0);
            let spec = LossSpec::unit(lo + rng.random::<f64>() * (0.95 - lo))?;
            let perms: Vec<Vec<usize>> = if k <= 3 {
                (0..=k).permutations(k + 1).collect()
            } else {
                (0..50)
                    .map(|_| {
                        let mut p: Vec<usize> = (0..=k).collect();
                        p.shuffle(&mut rng);
                        p
                    })
                    .collect()
            };
            for p in perms {
                let ok = fold_permutation_check(&aug, &p, &spec, &LeastSquaresTrainer)?;
                t.check(ok, || format!("K={k} perm={p:?}"));
            }
        }
    }
    Ok(t.finish())
}

fn bag_oracle(cfg: &VerifyConfig) -> Result<(PropertyOutcome, PropertyOutcome)> {
    let mut rng = stream(cfg.seed, 5);
    let mut t = Tally::new("bag oracle: E[v_m] <= alpha");
    let mut neg = Tally::new("bag oracle negative control");
    let grid = |rng: &mut ChaCha8Rng| rng.random_range(0..=16) as f64 / 16.0;
    for _ in 0..(cfg.trials / 5).max(1) {
        let len = rng.random_range(2..=5);
        let alpha = rng.random_range(1..=15) as f64 / 16.0;
        let count = rng.random_range(1..=4);
        let mut vectors = Vec::with_capacity(count);
        for _ in 0..count {
            let mut v: Vec<f64> = (0..len).map(|_| grid(&mut rng)).collect();
            // lower the largest entry until the hypothesis mean ≤ α holds
            while v.iter().sum::<f64>() > alpha * len as f64 {
                let i = v.iter().position_max_by(|a, b| a.total_cmp(b)).unwrap();
                v[i] -= 1.0 / 16.0;
            }
            vectors.push(v);
        }
        if rng.random_bool(0.1) {
            vectors[0] = vec![alpha; len];
        }
        let raw: Vec<f64> = (0..count).map(|_| rng.random_range(1..=8) as f64).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let m_index = rng.random_range(0..len);
        let (lhs, bound) = lemma1_oracle(&vectors, &weights, m_index, alpha)?;
        let bags_ok = bag_decomposition(&vectors, &weights, m_index)?.iter().all(|b| b.matches_bag_mean);
        t.check(lhs <= bound && bags_ok, || format!("vectors={vectors:?} weights={weights:?} lhs={lhs} alpha={alpha}"));

        // negative control: push one vector's mean above α
        let mut bad = vectors.clone();
        bad[0] = vec![1.0; len];
        let weights = vec![1.0 / count as f64; count];
        let expect = lemma1_expectation(&bad, &weights, m_index);
        let rejected = matches!(lemma1_oracle(&bad, &weights, m_index, alpha), Err(CrcError::Hypothesis(_)));
        if count == 1 {
            neg.check(rejected && expect.map(|e| e > alpha).unwrap_or(false), || format!("{bad:?} alpha={alpha}"));
        } else {
            neg.check(rejected, || format!("{bad:?} alpha={alpha} not rejected"));
        }
    }
    Ok((t.finish(), neg.finish()))
}

fn jackknife(cfg: &VerifyConfig) -> Result<PropertyOutcome> {
    let mut rng = stream(cfg.seed, 6);
    let mut t = Tally::new("K=N miscoverage reduces to jackknife-minmax");
    for _ in 0..(cfg.trials / 5).max(1) {
        let n = rng.random_range(2..=20);
        let d = rng.random_range(1..=5);
        let aug = regression_instance(&mut rng, n - 1, 1, d, 1);
        let examples: Vec<Example> = aug.folds().iter().flatten().cloned().collect();
        let trainer = LeastSquaresTrainer;
        let mut scores = Vec::with_capacity(n);
        for i in 0..n {
            let rest: Vec<&Example> = examples.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, e)| e).collect();
            let model = trainer.train(&rest)?;
            scores.push(crate::regression::nc_max_residual(&model, &examples[i].x, &examples[i].y));
        }
        let spec = loop {
            let s = LossSpec::unit(random_alpha(&mut rng, 1.0 / (n as f64 + 1.0)))?;
            if check_fold_condition(&s, n).is_ok() {
                break s;
            }
        };
        let folds: Vec<Vec<LossCurve>> = scores.iter().map(|&s| LossCurve::miscoverage(s).map(|c| vec![c])).collect::<Result<_>>()?;
        let cv = cv_threshold(&folds, &spec, n, n)?;
        let reference = jackknife_minmax_threshold(&scores, spec.alpha());
        t.check(cv.lambda == reference, || format!("N={n} alpha={} cv={} reference={reference}", spec.alpha(), cv.lambda));
    }
    Ok(t.finish())
}

/// Runs every property and returns one outcome per property.
pub fn run_suite(cfg: &VerifyConfig) -> Result<Vec<PropertyOutcome>> {
    let (bag, negative) = bag_oracle(cfg)?;
    Ok(vec![
        oracle_equivalence_vb(cfg)?,
        oracle_equivalence_cv(cfg)?,
        l2o_lower_bound(cfg)?,
        l2o_permutation_invariance(cfg)?,
        bag,
        negative,
        jackknife(cfg)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_curves_are_unit_bounded() {
        let mut rng = stream(1, 0);
        for _ in 0..200 {
            let c = random_curve(&mut rng, 8);
            assert!(c.max_value() <= 1.0 && c.min_value() >= 0.0);
            assert!(c.steps().len() <= 8);
        }
    }

    #[test]
    fn small_suite_passes() {
        let out = run_suite(&VerifyConfig { seed: 3, trials: 50 }).unwrap();
        for o in &out {
            assert!(o.passed(), "{o:?}");
        }
    }
}
