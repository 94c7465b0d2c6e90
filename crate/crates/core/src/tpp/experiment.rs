use rand::Rng;

use super::{fit_median_predictor, rollout_predict, HawkesParams, HawkesSimulator, MedianPredictor};
use crate::error::{CrcError, Result};
use crate::experiment::{run_parallel, run_rng, sort_records, RunRecord, Scheme};
use crate::folds::partition_folds;
use crate::intervals::{inefficiency, BoxSet};
use crate::loss::{LossCurve, LossSpec};
use crate::threshold::{check_fold_condition, cv_threshold, vb_threshold, CalibrationBatch, ThresholdResult};

#[derive(Debug, Clone, PartialEq)]
pub struct TppConfig {
    pub hawkes: HawkesParams,
    /// Observed events per example.
    pub d: usize,
    /// Predicted events per example.
    pub m: usize,
    /// Common ratio of the interval half-widths.
    pub gamma: f64,
    pub alpha: f64,
    pub n_train_total: usize,
    pub n_folds: usize,
    /// Use one fold per example, overriding `n_folds`.
    pub k_equals_n: bool,
    pub n_test: usize,
    pub n_runs: usize,
    pub vb_split_fraction: f64,
    /// Simulated time discarded before windowing.
    pub burn_in: f64,
    /// Multiplier applied to the fitted median gap (1 = fitted predictor).
    pub predictor_scale: f64,
    pub seed: u64,
    pub parallelism: usize,
}

impl Default for TppConfig {
    fn default() -> Self {
        TppConfig {
            hawkes: HawkesParams::default(),
            d: 60,
            m: 6,
            gamma: 1.2,
            alpha: 1.0 / 6.0,
            n_train_total: 20,
            n_folds: 5,
            k_equals_n: false,
            n_test: 1000,
            n_runs: 200,
            vb_split_fraction: 0.5,
            burn_in: 100.0,
            predictor_scale: 1.0,
            seed: 0,
            parallelism: 0,
        }
    }
}

impl TppConfig {
    pub fn folds(&self) -> usize {
        if self.k_equals_n {
            self.n_train_total
        } else {
            self.n_folds
        }
    }

    fn cv_scheme(&self) -> Scheme {
        if self.folds() == self.n_train_total {
            Scheme::NCv
        } else {
            Scheme::Cv
        }
    }

    pub fn validate(&self) -> Result<LossSpec> {
        self.hawkes.validate()?;
        if self.d < 2 || self.m == 0 {
            return Err(CrcError::Config(format!("need d >= 2 and m >= 1, got d = {}, m = {}", self.d, self.m)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(CrcError::Config(format!("gamma must be positive, got {}", self.gamma)));
        }
        if !(self.vb_split_fraction > 0.0 && self.vb_split_fraction < 1.0) {
            return Err(CrcError::Config(format!("vb_split_fraction {} not in (0, 1)", self.vb_split_fraction)));
        }
        if !(self.predictor_scale > 0.0 && self.burn_in >= 0.0) {
            return Err(CrcError::Config("predictor_scale must be positive and burn_in nonnegative".into()));
        }
        let spec = LossSpec::unit(self.alpha)?;
        partition_folds(self.n_train_total, self.folds())?;
        check_fold_condition(&spec, self.folds())?;
        Ok(spec)
    }
}

/// `d` observed times followed by the `m` times to predict.
#[derive(Debug, Clone, PartialEq)]
pub struct TppExample {
    pub observed: Vec<f64>,
    pub targets: Vec<f64>,
}

/// Splits consecutive events into non-overlapping `(d, m)` windows.
pub fn windows(times: &[f64], d: usize, m: usize) -> Vec<TppExample> {
    times
        .chunks_exact(d + m)
        .map(|w| TppExample { observed: w[..d].to_vec(), targets: w[d..].to_vec() })
        .collect()
}

fn simulate_examples<R: Rng>(cfg: &TppConfig, rng: &mut R, count: usize) -> Result<Vec<TppExample>> {
    let mut sim = HawkesSimulator::new(cfg.hawkes, rng)?;
    let need = count * (cfg.d + cfg.m);
    let mut times = Vec::with_capacity(need);
    while times.len() < need {
        let t = sim.next_event();
        if t >= cfg.burn_in {
            times.push(t);
        }
    }
    Ok(windows(&times, cfg.d, cfg.m))
}

/// Fraction-loss curve for the union over models of `t̂_{d+j} ± γ^j λ/2`.
/// Step `j` (1-based) is covered from `λ = min_k 2 |y_j − t̂_j^{(k)}| / γ^j` on.
pub fn tpp_loss_curve(targets: &[f64], fold_predictions: &[Vec<f64>], gamma: f64) -> Result<LossCurve> {
    if fold_predictions.is_empty() || fold_predictions.iter().any(|p| p.len() != targets.len()) {
        return Err(CrcError::ShapeMismatch("one m-vector of predictions per model".into()));
    }
    let thresholds: Vec<f64> = targets
        .iter()
        .enumerate()
        .map(|(j, &y)| {
            let best = fold_predictions.iter().map(|p| (y - p[j]).abs()).fold(f64::INFINITY, f64::min);
            2.0 * best / gamma.powi(j as i32 + 1)
        })
        .collect();
    LossCurve::fraction_uncovered(&thresholds)
}

fn half_widths(gamma: f64, m: usize, lambda: f64) -> Vec<f64> {
    (1..=m).map(|j| gamma.powi(j as i32) * lambda / 2.0).collect()
}

fn fit(cfg: &TppConfig, training: &[&TppExample]) -> Result<MedianPredictor> {
    let mut p = fit_median_predictor(training)?;
    p.median_gap *= cfg.predictor_scale;
    Ok(p)
}

fn evaluate_test(cfg: &TppConfig, predictors: &[MedianPredictor], thr: &ThresholdResult, test: &[TppExample]) -> Result<(f64, f64)> {
    let mut loss = 0.0;
    let mut ineff = 0.0;
    for ex in test {
        let preds: Vec<Vec<f64>> = predictors.iter().map(|p| rollout_predict(p, &ex.observed, cfg.m)).collect();
        loss += tpp_loss_curve(&ex.targets, &preds, cfg.gamma)?.evaluate(thr.lambda);
        if thr.feasible {
            ineff += inefficiency(&BoxSet::centered(&preds, &half_widths(cfg.gamma, cfg.m, thr.lambda)));
        }
    }
    let n = test.len().max(1) as f64;
    Ok((loss / n, if thr.feasible { ineff / n } else { f64::INFINITY }))
}

/// One run: simulate training and test windows, calibrate both schemes.
pub fn run_tpp_once(cfg: &TppConfig, spec: &LossSpec, run: usize) -> Result<[RunRecord; 2]> {
    let n = cfg.n_train_total;
    let mut rng = run_rng(cfg.seed, n, run);
    let data = simulate_examples(cfg, &mut rng, n)?;
    let test = simulate_examples(cfg, &mut rng, cfg.n_test)?;
    let record = |scheme, k, thr: &ThresholdResult, (risk, inefficiency): (f64, f64)| RunRecord {
        run_index: run,
        scheme,
        n,
        k,
        risk,
        inefficiency,
        infeasible_count: usize::from(!thr.feasible),
    };

    let n_tr = ((n as f64 * cfg.vb_split_fraction).round() as usize).clamp(1, n - 1);
    let train: Vec<&TppExample> = data[..n_tr].iter().collect();
    let pred = fit(cfg, &train)?;
    let val_curves = data[n_tr..]
        .iter()
        .map(|e| tpp_loss_curve(&e.targets, &[rollout_predict(&pred, &e.observed, cfg.m)], cfg.gamma))
        .collect::<Result<Vec<_>>>()?;
    let vb = vb_threshold(&CalibrationBatch::unweighted(val_curves), spec)?;
    let vb_rec = record(Scheme::Vb, 0, &vb, evaluate_test(cfg, &[pred], &vb, &test)?);

    let k = cfg.folds();
    let folds = partition_folds(n, k)?;
    let mut preds = Vec::with_capacity(k);
    let mut fold_curves = Vec::with_capacity(k);
    for f in 0..k {
        let rest: Vec<&TppExample> = folds.complement(f).into_iter().map(|i| &data[i]).collect();
        let p = fit(cfg, &rest)?;
        let curves = folds
            .members(f)
            .map(|i| tpp_loss_curve(&data[i].targets, &[rollout_predict(&p, &data[i].observed, cfg.m)], cfg.gamma))
            .collect::<Result<Vec<_>>>()?;
        fold_curves.push(curves);
        preds.push(p);
    }
    let cv = cv_threshold(&fold_curves, spec, n, k)?;
    let cv_rec = record(cfg.cv_scheme(), k, &cv, evaluate_test(cfg, &preds, &cv, &test)?);
    Ok([vb_rec, cv_rec])
}

pub fn run_tpp_experiment(cfg: &TppConfig) -> Result<Vec<RunRecord>> {
    let spec = cfg.validate()?;
    let results = run_parallel((0..cfg.n_runs).collect(), cfg.parallelism, |run| run_tpp_once(cfg, &spec, run))?;
    let mut records = Vec::with_capacity(2 * cfg.n_runs);
    for r in results {
        records.extend(r?);
    }
    sort_records(&mut records);
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn curve_breakpoints() {
        let c = tpp_loss_curve(&[5.0, 6.0], &[vec![5.0, 6.0]], 1.2).unwrap();
        assert_eq!(c, LossCurve::new(1.0, vec![(0.0, 0.0)]).unwrap());
        let c = tpp_loss_curve(&[3.6], &[vec![3.0]], 1.2).unwrap();
        assert!((c.steps()[0].0 - 1.0).abs() < 1e-12);
        assert!(tpp_loss_curve(&[1.0], &[vec![1.0, 2.0]], 1.2).is_err());
    }

    #[test]
    fn gamma_scaling_of_breakpoints() {
        let targets = [1.0, 2.5, 4.0];
        let preds = [vec![1.3, 2.0, 3.1]];
        let a = tpp_loss_curve(&targets, &preds, 1.2).unwrap();
        let c = 1.5;
        let b = tpp_loss_curve(&targets, &preds, 1.2 * c).unwrap();
        let thr = |g: f64, j: usize| 2.0 * (targets[j] - preds[0][j]).abs() / g.powi(j as i32 + 1);
        for j in 0..3 {
            assert!((thr(1.2 * c, j) - thr(1.2, j) * c.powi(-(j as i32 + 1))).abs() < 1e-12);
        }
        // same coverage ordering here, so the same number of breakpoints
        assert_eq!(a.steps().len(), b.steps().len());
    }

    #[test]
    fn union_membership_matches_curve() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let m = rng.random_range(1..=6);
            let k = rng.random_range(1..=4);
            let targets: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..10.0)).collect();
            let preds: Vec<Vec<f64>> = (0..k).map(|_| (0..m).map(|_| rng.random_range(0.0..10.0)).collect()).collect();
            let lambda = rng.random_range(0.0..12.0);
            let curve = tpp_loss_curve(&targets, &preds, 1.2).unwrap();
            let set = BoxSet::centered(&preds, &half_widths(1.2, m, lambda));
            let missed = (0..m).filter(|&j| !set.dim(j).contains(targets[j])).count();
            assert_eq!(curve.evaluate(lambda), missed as f64 / m as f64);
        }
    }

    #[test]
    fn non_overlapping_windows() {
        let times: Vec<f64> = (0..25).map(f64::from).collect();
        let w = windows(&times, 3, 2);
        assert_eq!(w.len(), 5);
        assert_eq!(w[1].observed, vec![5.0, 6.0, 7.0]);
        assert_eq!(w[1].targets, vec![8.0, 9.0]);
    }

    #[test]
    fn config_checks() {
        let cfg = TppConfig { n_folds: 4, ..Default::default() };
        assert_eq!(cfg.validate(), Err(CrcError::FoldCondition { k: 4, min_k: 5 }));
        let cfg = TppConfig { k_equals_n: true, n_train_total: 12, ..Default::default() };
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.folds(), 12);
    }

    #[test]
    fn deterministic_runs() {
        let cfg = TppConfig { n_train_total: 10, k_equals_n: true, n_test: 20, n_runs: 3, seed: 9, ..Default::default() };
        let a = run_tpp_experiment(&cfg).unwrap();
        let b = run_tpp_experiment(&TppConfig { parallelism: 1, ..cfg.clone() }).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().any(|r| r.scheme == Scheme::NCv && r.k == 10));
    }
}
