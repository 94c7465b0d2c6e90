//! Seeded Monte Carlo harness shared by the two experiments.
//!
//! Each run draws from its own ChaCha stream derived from `(seed, N, run)`,
//! so results do not depend on how runs are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;

use crate::error::{CrcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// Validation-based calibration (train/validation split).
    Vb,
    /// `K`-fold cross-validation calibration.
    Cv,
    /// Cross-validation with one fold per example (`K = N`).
    NCv,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Vb => "VB",
            Scheme::Cv => "CV",
            Scheme::NCv => "N-CV",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Outcome of one scheme in one Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_index: usize,
    pub scheme: Scheme,
    pub n: usize,
    /// Number of folds; 0 for validation-based runs.
    pub k: usize,
    /// Mean test loss.
    pub risk: f64,
    /// Mean test inefficiency, `+∞` when the threshold was infeasible.
    pub inefficiency: f64,
    pub infeasible_count: usize,
}

pub fn sort_records(records: &mut [RunRecord]) {
    records.sort_by(|a, b| {
        (a.scheme, a.n, a.k, a.run_index).cmp(&(b.scheme, b.n, b.k, b.run_index))
    });
}

/// Random stream for run `run` at data-set size `n`.
pub fn run_rng(seed: u64, n: usize, run: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | run as u64);
    rng
}

/// Maps `f` over `items` on a pool of `parallelism` threads (0 = all cores),
/// returning results in input order.
pub fn run_parallel<T, R, F>(items: Vec<T>, parallelism: usize, f: F) -> Result<Vec<R>>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| CrcError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| items.into_par_iter().map(f).collect()))
}

/// Sample mean and standard error (sample standard deviation over `√n`).
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Per-(scheme, N, K) aggregate across runs. Infeasible runs count towards
/// the risk but are left out of the inefficiency mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub scheme: Scheme,
    pub n: usize,
    pub k: usize,
    pub runs: usize,
    pub mean_risk: f64,
    pub se_risk: f64,
    pub mean_inefficiency: f64,
    pub se_inefficiency: f64,
    pub infeasible_runs: usize,
}

pub fn summarize(records: &[RunRecord]) -> Vec<Summary> {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut out = Vec::new();
    for group in sorted.chunk_by(|a, b| (a.scheme, a.n, a.k) == (b.scheme, b.n, b.k)) {
        let risks: Vec<f64> = group.iter().map(|r| r.risk).collect();
        let ineff: Vec<f64> = group
            .iter()
            .filter(|r| r.infeasible_count == 0 && r.inefficiency.is_finite())
            .map(|r| r.inefficiency)
            .collect();
        let (mean_risk, se_risk) = mean_se(&risks);
        let (mean_inefficiency, se_inefficiency) = mean_se(&ineff);
        out.push(Summary {
            scheme: group[0].scheme,
            n: group[0].n,
            k: group[0].k,
            runs: group.len(),
            mean_risk,
            se_risk,
            mean_inefficiency,
            se_inefficiency,
            infeasible_runs: group.iter().filter(|r| r.infeasible_count > 0).count(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn mean_and_standard_error() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_se(&[7.0]), (7.0, 0.0));
        assert!(mean_se(&[]).0.is_nan());
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: u64 = run_rng(7, 40, 0).random();
        let b: u64 = run_rng(7, 40, 1).random();
        let c: u64 = run_rng(7, 80, 0).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, run_rng(7, 40, 0).random::<u64>());
    }

    #[test]
    fn parallel_map_keeps_order() {
        let out = run_parallel((0..100).collect(), 4, |i: usize| i * 2).unwrap();
        assert_eq!(out, (0..100).map(|i| i * 2).collect::<Vec<_>>());
    }

    #[test]
    fn summary_excludes_infeasible_inefficiency() {
        let rec = |run, ineff: f64, inf| RunRecord {
            run_index: run,
            scheme: Scheme::Vb,
            n: 10,
            k: 0,
            risk: 0.1,
            inefficiency: ineff,
            infeasible_count: inf,
        };
        let s = summarize(&[rec(0, 2.0, 0), rec(1, f64::INFINITY, 1), rec(2, 4.0, 0)]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].runs, 3);
        assert_eq!(s[0].mean_inefficiency, 3.0);
        assert_eq!(s[0].infeasible_runs, 1);
    }
}
