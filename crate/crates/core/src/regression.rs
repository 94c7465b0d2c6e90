//! Vector regression with a hierarchical Gaussian task prior.
//!
//! A task `φ ∈ R^{d×m}` is drawn once per run: a Bernoulli(0.5) vector `b`
//! shared by all columns, then `φ_{·c} ~ N(μ0 b, γ0⁻¹ I_d)`. Pairs follow
//! `x ~ N(0, d⁻¹ I_d)` and `y | x ~ N(φᵀx, β0⁻¹ I_m)`. The predictor is the
//! minimum-norm least-squares fit, the score is `2‖y − ŷ‖∞`, and sets are
//! per-dimension intervals of half-width `λ/2` (a union over the
//! leave-fold-out models for CV). The loss is the fraction of missed entries.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Bernoulli, Distribution, Normal};

use crate::error::{CrcError, Result};
use crate::experiment::{run_parallel, run_rng, RunRecord, Scheme};
use crate::folds::partition_folds;
use crate::intervals::{inefficiency, BoxSet};
use crate::loss::{LossCurve, LossSpec};
use crate::threshold::{check_fold_condition, cv_threshold, vb_threshold, CalibrationBatch, ThresholdResult};
use crate::verify::FoldTrainer;

/// Relative singular-value cutoff of the pseudo-inverse.
pub const PINV_RCOND: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionConfig {
    pub mu0: f64,
    pub gamma0: f64,
    pub beta0: f64,
    pub d: usize,
    pub m: usize,
    pub n_train_total: usize,
    pub n_folds: usize,
    pub alpha: f64,
    pub n_test: usize,
    pub n_runs: usize,
    /// Fraction of the data used for training in the validation-based scheme.
    pub vb_split_fraction: f64,
    pub seed: u64,
    /// Worker threads, 0 for all cores.
    pub parallelism: usize,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        RegressionConfig {
            mu0: 10.0,
            gamma0: 1.0,
            beta0: 4.0,
            d: 50,
            m: 30,
            n_train_total: 80,
            n_folds: 20,
            alpha: 0.1,
            n_test: 200,
            n_runs: 50,
            vb_split_fraction: 0.5,
            seed: 0,
            parallelism: 0,
        }
    }
}

impl RegressionConfig {
    pub fn validate(&self) -> Result<LossSpec> {
        let bad = |msg: String| Err(CrcError::Config(msg));
        if self.d == 0 || self.m == 0 {
            return bad("d and m must be positive".into());
        }
        if !(self.gamma0 > 0.0 && self.beta0 > 0.0) || !self.mu0.is_finite() {
            return bad("gamma0 and beta0 must be positive, mu0 finite".into());
        }
        if !(self.vb_split_fraction > 0.0 && self.vb_split_fraction < 1.0) {
            return bad(format!("vb_split_fraction {} not in (0, 1)", self.vb_split_fraction));
        }
        if self.n_train_total < 2 {
            return bad("need at least two training examples".into());
        }
        let spec = LossSpec::unit(self.alpha)?;
        partition_folds(self.n_train_total, self.n_folds)?;
        check_fold_condition(&spec, self.n_folds)?;
        Ok(spec)
    }
}

/// Inputs (`N×d`) and labels (`N×m`), one example per row.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    pub inputs: DMatrix<f64>,
    pub labels: DMatrix<f64>,
}

impl RegressionData {
    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> Vec<f64> {
        self.inputs.row(i).iter().copied().collect()
    }

    pub fn y(&self, i: usize) -> Vec<f64> {
        self.labels.row(i).iter().copied().collect()
    }

    pub fn select(&self, rows: &[usize]) -> RegressionData {
        RegressionData { inputs: self.inputs.select_rows(rows), labels: self.labels.select_rows(rows) }
    }

    pub fn examples(&self) -> Vec<Example> {
        (0..self.len()).map(|i| Example { x: self.x(i), y: self.y(i) }).collect()
    }
}

/// One input/label pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Linear predictor `ŷ(x) = φᵀx` with `φ` of shape `d×m`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub coeffs: DMatrix<f64>,
}

impl LinearModel {
    pub fn predict(&self, x: &[f64]) -> Vec<f64> {
        let (d, m) = self.coeffs.shape();
        assert_eq!(x.len(), d, "input dimension");
        (0..m).map(|c| (0..d).map(|i| self.coeffs[(i, c)] * x[i]).sum()).collect()
    }
}

pub fn sample_task<R: Rng + ?Sized>(cfg: &RegressionConfig, rng: &mut R) -> DMatrix<f64> {
    let coin = Bernoulli::new(0.5).unwrap();
    let b: Vec<f64> = (0..cfg.d).map(|_| if coin.sample(rng) { 1.0 } else { 0.0 }).collect();
    let noise = Normal::new(0.0, cfg.gamma0.recip().sqrt()).expect("gamma0 > 0");
    let mut phi = DMatrix::zeros(cfg.d, cfg.m);
    for c in 0..cfg.m {
        for i in 0..cfg.d {
            phi[(i, c)] = cfg.mu0 * b[i] + noise.sample(rng);
        }
    }
    phi
}

pub fn sample_pair<R: Rng + ?Sized>(cfg: &RegressionConfig, phi: &DMatrix<f64>, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let input = Normal::new(0.0, (1.0 / cfg.d as f64).sqrt()).unwrap();
    let noise = Normal::new(0.0, cfg.beta0.recip().sqrt()).expect("beta0 > 0");
    let x: Vec<f64> = (0..cfg.d).map(|_| input.sample(rng)).collect();
    let y = LinearModel { coeffs: phi.clone() }.predict(&x).into_iter().map(|mean| mean + noise.sample(rng)).collect();
    (x, y)
}

pub fn sample_dataset<R: Rng + ?Sized>(cfg: &RegressionConfig, phi: &DMatrix<f64>, n: usize, rng: &mut R) -> RegressionData {
    let mut inputs = DMatrix::zeros(n, cfg.d);
    let mut labels = DMatrix::zeros(n, cfg.m);
    for i in 0..n {
        let (x, y) = sample_pair(cfg, phi, rng);
        inputs.row_mut(i).copy_from_slice(&x);
        labels.row_mut(i).copy_from_slice(&y);
    }
    RegressionData { inputs, labels }
}

/// Minimum-norm least-squares fit `φ = X†Y`.
///
/// Rows are put in a canonical (lexicographic) order before factorizing, so
/// the result is bit-for-bit independent of the order of the examples.
pub fn fit_ml(inputs: &DMatrix<f64>, labels: &DMatrix<f64>) -> Result<LinearModel> {
    let n = inputs.nrows();
    if n == 0 {
        return Err(CrcError::Empty("no training examples".into()));
    }
    if labels.nrows() != n {
        return Err(CrcError::ShapeMismatch(format!("{n} input rows but {} label rows", labels.nrows())));
    }
    if inputs.iter().chain(labels.iter()).any(|v| !v.is_finite()) {
        return Err(CrcError::NonFinite("training data".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        inputs
            .row(a)
            .iter()
            .chain(labels.row(a).iter())
            .zip(inputs.row(b).iter().chain(labels.row(b).iter()))
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let x = inputs.select_rows(&order);
    let y = labels.select_rows(&order);

    let svd = x.svd(true, true);
    let cutoff = PINV_RCOND * svd.singular_values.max();
    let coeffs = svd.solve(&y, cutoff).map_err(|e| CrcError::NonFinite(e.to_string()))?;
    Ok(LinearModel { coeffs })
}

/// `2 · max_j |y_j − ŷ_j(x)|`.
pub fn nc_max_residual(model: &LinearModel, x: &[f64], y: &[f64]) -> f64 {
    2.0 * model.predict(x).iter().zip(y).map(|(p, v)| (v - p).abs()).fold(0.0, f64::max)
}

pub fn vb_box(model: &LinearModel, x: &[f64], lambda: f64) -> BoxSet {
    cv_box(std::slice::from_ref(model), x, lambda)
}

/// Union over models of the intervals `ŷ_j ± λ/2`.
pub fn cv_box(models: &[LinearModel], x: &[f64], lambda: f64) -> BoxSet {
    let centers: Vec<Vec<f64>> = models.iter().map(|mdl| mdl.predict(x)).collect();
    let m = centers.first().map_or(0, Vec::len);
    BoxSet::centered(&centers, &vec![lambda / 2.0; m])
}

/// Fraction-loss curve from residual magnitudes, `residuals[j][k]` for
/// dimension `j` and model `k`. Dimension `j` is covered from
/// `λ = 2 · min_k residuals[j][k]` on.
pub fn loss_curve_for_example(residuals: &[Vec<f64>]) -> Result<LossCurve> {
    let thresholds: Vec<f64> = residuals
        .iter()
        .map(|r| 2.0 * r.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min))
        .collect();
    LossCurve::fraction_uncovered(&thresholds)
}

/// Loss curve of `(x, y)` against the union set built from `models`.
pub fn example_loss_curve(models: &[LinearModel], x: &[f64], y: &[f64]) -> Result<LossCurve> {
    let preds: Vec<Vec<f64>> = models.iter().map(|mdl| mdl.predict(x)).collect();
    let residuals: Vec<Vec<f64>> = (0..y.len()).map(|j| preds.iter().map(|p| y[j] - p[j]).collect()).collect();
    loss_curve_for_example(&residuals)
}

/// Least-squares training with the fraction loss on single-model interval sets.
#[derive(Debug, Clone, Copy, Default)]
pub struct LeastSquaresTrainer;

impl FoldTrainer<Example> for LeastSquaresTrainer {
    type Model = LinearModel;

    fn train(&self, examples: &[&Example]) -> Result<LinearModel> {
        let first = examples.first().ok_or_else(|| CrcError::Empty("no training examples".into()))?;
        let (d, m) = (first.x.len(), first.y.len());
        let inputs = DMatrix::from_row_iterator(examples.len(), d, examples.iter().flat_map(|e| e.x.iter().copied()));
        let labels = DMatrix::from_row_iterator(examples.len(), m, examples.iter().flat_map(|e| e.y.iter().copied()));
        fit_ml(&inputs, &labels)
    }

    fn loss_curve(&self, model: &LinearModel, example: &Example) -> Result<LossCurve> {
        example_loss_curve(std::slice::from_ref(model), &example.x, &example.y)
    }
}

fn evaluate_test(
    models: &[LinearModel],
    threshold: &ThresholdResult,
    test: &RegressionData,
) -> Result<(f64, f64)> {
    let mut loss = 0.0;
    let mut ineff = 0.0;
    for i in 0..test.len() {
        let (x, y) = (test.x(i), test.y(i));
        loss += example_loss_curve(models, &x, &y)?.evaluate(threshold.lambda);
        if threshold.feasible {
            ineff += inefficiency(&cv_box(models, &x, threshold.lambda));
        }
    }
    let n = test.len().max(1) as f64;
    let ineff = if threshold.feasible { ineff / n } else { f64::INFINITY };
    Ok((loss / n, ineff))
}

fn record(run: usize, scheme: Scheme, n: usize, k: usize, thr: &ThresholdResult, (risk, ineff): (f64, f64)) -> RunRecord {
    RunRecord {
        run_index: run,
        scheme,
        n,
        k,
        risk,
        inefficiency: ineff,
        infeasible_count: usize::from(!thr.feasible),
    }
}

/// One Monte Carlo run: fresh task, training and test data, then both schemes.
pub fn run_regression_once(cfg: &RegressionConfig, spec: &LossSpec, run: usize) -> Result<[RunRecord; 2]> {
    let n = cfg.n_train_total;
    let mut rng = run_rng(cfg.seed, n, run);
    let phi = sample_task(cfg, &mut rng);
    let data = sample_dataset(cfg, &phi, n, &mut rng);
    let test = sample_dataset(cfg, &phi, cfg.n_test, &mut rng);

    // validation-based: first n_tr rows train, the rest validate
    let n_tr = ((n as f64 * cfg.vb_split_fraction).round() as usize).clamp(1, n - 1);
    let train: Vec<usize> = (0..n_tr).collect();
    let model = {
        let t = data.select(&train);
        fit_ml(&t.inputs, &t.labels)?
    };
    let val_curves = (n_tr..n)
        .map(|i| example_loss_curve(std::slice::from_ref(&model), &data.x(i), &data.y(i)))
        .collect::<Result<Vec<_>>>()?;
    let vb = vb_threshold(&CalibrationBatch::unweighted(val_curves), spec)?;
    let vb_rec = record(run, Scheme::Vb, n, 0, &vb, evaluate_test(std::slice::from_ref(&model), &vb, &test)?);

    // cross-validation
    let folds = partition_folds(n, cfg.n_folds)?;
    let mut models = Vec::with_capacity(cfg.n_folds);
    let mut fold_curves = Vec::with_capacity(cfg.n_folds);
    for k in 0..cfg.n_folds {
        let t = data.select(&folds.complement(k));
        let mdl = fit_ml(&t.inputs, &t.labels)?;
        let curves = folds
            .members(k)
            .map(|i| example_loss_curve(std::slice::from_ref(&mdl), &data.x(i), &data.y(i)))
            .collect::<Result<Vec<_>>>()?;
        fold_curves.push(curves);
        models.push(mdl);
    }
    let cv = cv_threshold(&fold_curves, spec, n, cfg.n_folds)?;
    let cv_rec = record(run, Scheme::Cv, n, cfg.n_folds, &cv, evaluate_test(&models, &cv, &test)?);
    Ok([vb_rec, cv_rec])
}

/// All runs for one data-set size, records sorted by (scheme, N, K, run).
pub fn run_regression_experiment(cfg: &RegressionConfig) -> Result<Vec<RunRecord>> {
    let spec = cfg.validate()?;
    let results = run_parallel((0..cfg.n_runs).collect(), cfg.parallelism, |run| run_regression_once(cfg, &spec, run))?;
    let mut records = Vec::with_capacity(2 * cfg.n_runs);
    for r in results {
        records.extend(r?);
    }
    crate::experiment::sort_records(&mut records);
    Ok(records)
}
