//! Acceptance gate: every criterion runs at its stated scale and tolerance and
//! prints one PASS/FAIL line. The process exits nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use cvcrc::experiment::{summarize, RunRecord, Scheme, Summary};
use cvcrc::regression::{run_regression_experiment, RegressionConfig};
use cvcrc::tpp::{
    exponential_cdf, ks_test, rescaled_interarrivals, run_tpp_experiment, simulate_hawkes, HawkesParams, TppConfig,
};
use cvcrc::verify::{lemma1_expectation, run_suite, PropertyOutcome, VerifyConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn find(summaries: &[Summary], scheme: Scheme, n: usize) -> &Summary {
    summaries.iter().find(|s| s.scheme == scheme && s.n == n).expect("summary present")
}

fn risk_controlled(summaries: &[Summary], alpha: f64) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in summaries {
        let ok = s.mean_risk <= alpha + 3.0 * s.se_risk;
        pass &= ok;
        parts.push(format!("{} N={}: {:.4} ± {:.4}", s.scheme, s.n, s.mean_risk, s.se_risk));
    }
    outcome(pass, format!("target {alpha:.4}; {}", parts.join(", ")))
}

fn cv_more_efficient(summaries: &[Summary], cv: Scheme, n: usize) -> (bool, String) {
    let (c, v) = (find(summaries, cv, n), find(summaries, Scheme::Vb, n));
    let ok = c.mean_inefficiency + c.se_inefficiency < v.mean_inefficiency;
    (
        ok,
        format!(
            "N={n}: {} {:.3} ± {:.3} vs VB {:.3} ± {:.3}",
            cv, c.mean_inefficiency, c.se_inefficiency, v.mean_inefficiency, v.se_inefficiency
        ),
    )
}

fn regression_records() -> Vec<RunRecord> {
    let base = RegressionConfig { n_runs: 20, n_test: 100, n_folds: 20, d: 50, m: 30, alpha: 0.1, seed: 0, ..Default::default() };
    [40, 80]
        .iter()
        .flat_map(|&n| run_regression_experiment(&RegressionConfig { n_train_total: n, ..base.clone() }).unwrap())
        .collect()
}

fn tpp_records() -> Vec<RunRecord> {
    let base = TppConfig { n_runs: 20, n_test: 200, k_equals_n: true, alpha: 1.0 / 6.0, seed: 0, ..Default::default() };
    [10, 20]
        .iter()
        .flat_map(|&n| run_tpp_experiment(&TppConfig { n_train_total: n, ..base.clone() }).unwrap())
        .collect()
}

fn property(outcomes: &[PropertyOutcome], name: &str, expected: usize) -> (bool, String) {
    let o = outcomes.iter().find(|o| o.name == name).expect("property present");
    let ok = o.passed() && o.checked >= expected;
    let mut s = format!("{}: {} checked, {} failures", o.name, o.checked, o.failures);
    if let Some(d) = &o.detail {
        s.push_str(&format!(" [{d}]"));
    }
    (ok, s)
}

fn hawkes_statistics() -> Outcome {
    let params = HawkesParams::default();
    let (horizon, burn_in) = (1e6, 100.0);
    let seq = simulate_hawkes(&params, ChaCha8Rng::seed_from_u64(11), horizon, burn_in).unwrap();
    let rate = seq.len() as f64 / horizon;
    let rate_ok = (rate - params.stationary_rate()).abs() <= 0.05 * params.stationary_rate();

    // rescaling needs the full history, so start this sequence from t = 0
    let seq = simulate_hawkes(&params, ChaCha8Rng::seed_from_u64(12), 2e5, 0.0).unwrap();
    let (_, p_hawkes) = ks_test(&rescaled_interarrivals(&params, 0.0, &seq), |x| exponential_cdf(x, 1.0));

    let poisson = HawkesParams { alpha1: 0.0, alpha2: 0.0, ..params };
    let seq = simulate_hawkes(&poisson, ChaCha8Rng::seed_from_u64(13), 5e5, 0.0).unwrap();
    let gaps: Vec<f64> = std::iter::once(0.0).chain(seq.times().iter().copied()).collect::<Vec<_>>().windows(2).map(|w| w[1] - w[0]).collect();
    let (_, p_poisson) = ks_test(&gaps, |x| exponential_cdf(x, poisson.mu));

    outcome(
        rate_ok && p_hawkes > 0.01 && p_poisson > 0.01,
        format!(
            "rate {rate:.4} (target {:.1} ± 5%), rescaled KS p = {p_hawkes:.3}, Poisson KS p = {p_poisson:.3}",
            params.stationary_rate()
        ),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_cvcrc")).current_dir(dir).args(args).output().expect("spawn cli");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn cli_determinism() -> Outcome {
    let curves = "0,1,1:0\n0,1,2:0\n0,1,3:0\n";
    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("regression", vec!["regression", "--seed", "7", "--runs", "2", "--n", "40", "--k", "20", "--alpha", "0.1", "--n-test", "50", "--out-dir", "out"]),
        ("tpp", vec!["tpp", "--seed", "7", "--runs", "3", "--n", "10", "--k-equals-n", "--alpha", "0.1667", "--n-test", "50", "--out-dir", "out"]),
        ("calibrate", vec!["calibrate", "curves.txt", "--alpha", "0.5"]),
        ("verify", vec!["verify", "--trials", "50"]),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, args) in &commands {
        let mut runs = Vec::new();
        for parallelism in ["1", "4"] {
            let dir = tempfile::tempdir().unwrap();
            std::fs::write(dir.path().join("curves.txt"), curves).unwrap();
            let mut a = args.clone();
            if matches!(*name, "regression" | "tpp") {
                a.extend(["--parallelism", parallelism]);
            }
            let (code, stdout) = run_cli(dir.path(), &a);
            let files = if dir.path().join("out").exists() { snapshot(&dir.path().join("out")) } else { Vec::new() };
            runs.push((code, stdout, files));
        }
        let same = runs[0] == runs[1] && runs[0].0 == 0;
        pass &= same;
        parts.push(format!("{name} {}", if same { "identical" } else { "DIFFERS" }));
    }
    outcome(pass, parts.join(", "))
}

fn main() {
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut timed = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        results.push((id, name, o, start.elapsed().as_secs_f64()));
    };

    let mut reg_sum = Vec::new();
    timed(1, "risk control, regression", &mut || {
        reg_sum = summarize(&regression_records());
        risk_controlled(&reg_sum, 0.1)
    });
    timed(2, "efficiency ordering, regression", &mut || {
        let (ok, s) = cv_more_efficient(&reg_sum, Scheme::Cv, 40);
        outcome(ok, s)
    });

    timed(3, "risk control and efficiency, point process", &mut || {
        let tpp_sum = summarize(&tpp_records());
        let risk = risk_controlled(&tpp_sum, 1.0 / 6.0);
        let (ok10, s10) = cv_more_efficient(&tpp_sum, Scheme::NCv, 10);
        let (ok20, s20) = cv_more_efficient(&tpp_sum, Scheme::NCv, 20);
        outcome(risk.pass && ok10 && ok20, format!("{}; {s10}; {s20}", risk.detail))
    });

    // one suite run covers criteria 4 to 8; its time is charged to criterion 4
    let mut suite = Vec::new();
    timed(4, "oracle equivalence", &mut || {
        suite = run_suite(&VerifyConfig { trials: 500, ..Default::default() }).unwrap();
        let (a, sa) = property(&suite, "oracle equivalence (VB)", 500);
        let (b, sb) = property(&suite, "oracle equivalence (CV)", 500);
        outcome(a && b, format!("{sa}; {sb}"))
    });
    timed(5, "L2O lower bound", &mut || {
        let (ok, s) = property(&suite, "L2O threshold lower-bounds CV threshold", 200);
        outcome(ok, s)
    });
    timed(6, "fold-permutation invariance", &mut || {
        // K = 2, 3 exhaustive (3! and 4! orders) and K = 4 sampled (50 orders), 10 instances each
        let (ok, s) = property(&suite, "L2O threshold fold-permutation invariance", 10 * (6 + 24 + 50));
        outcome(ok, s)
    });
    timed(7, "jackknife-minmax reduction", &mut || {
        let (ok, s) = property(&suite, "K=N miscoverage reduces to jackknife-minmax", 100);
        outcome(ok, s)
    });
    timed(8, "exchangeable mixture bound", &mut || {
        let (a, sa) = property(&suite, "bag oracle: E[v_m] <= alpha", 100);
        let (b, sb) = property(&suite, "bag oracle negative control", 1);
        // a permutation of [1, 1, 0] has mean 2/3 > 1/2, and so does each entry
        let e = lemma1_expectation(&[vec![1.0, 1.0, 0.0]], &[1.0], 0).unwrap();
        let c = e > 0.5;
        outcome(a && b && c, format!("{sa}; {sb}; explicit control E[v_0] = {e:.4} > 0.5"))
    });
    timed(9, "Hawkes simulator statistics", &mut hawkes_statistics);
    timed(10, "CLI determinism", &mut cli_determinism);

    let mut failed = 0;
    for (id, name, o, secs) in &results {
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status} {name} ({secs:.1}s): {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
