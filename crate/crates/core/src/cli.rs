//! Command-line front end: `regression`, `tpp`, `calibrate` and `verify`.
//!
//! Experiment settings come from defaults, then an optional `key=value`
//! config file, then flags, each layer overriding the previous one.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::curvefile::{calibrate, format_lambda, parse_curves, CalibrationMode};
use crate::error::{CrcError, Result};
use crate::loss::LossSpec;
use crate::regression::{run_regression_experiment, RegressionConfig};
use crate::report::write_report;
use crate::tpp::{run_tpp_experiment, TppConfig};
use crate::verify::{run_suite, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "cvcrc", version, about = "Validation- and cross-validation-based conformal risk control")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Vector regression experiment; writes regression.csv and two SVG plots.
    Regression(ExperimentArgs),
    /// Point-process interval experiment; writes tpp.csv and two SVG plots.
    Tpp {
        #[command(flatten)]
        common: ExperimentArgs,
        /// One fold per training example.
        #[arg(long)]
        k_equals_n: bool,
    },
    /// Threshold from a loss-curve file.
    Calibrate(CalibrateArgs),
    /// Run the oracle and property suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo runs per N.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Training set size; repeat for a sweep.
    #[arg(long = "n")]
    pub n: Vec<usize>,
    /// Number of folds.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub n_test: Option<usize>,
    /// Fraction of the data used for training by the validation-based scheme.
    #[arg(long)]
    pub vb_split: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// `key=value` settings file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    /// Loss-curve file, `-` for standard input.
    pub file: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Loss upper bound B.
    #[arg(long = "upper", default_value_t = 1.0, allow_hyphen_values = true)]
    pub upper: f64,
    /// Loss lower bound b.
    #[arg(long = "lower", default_value_t = 0.0, allow_hyphen_values = true)]
    pub lower: f64,
    #[arg(long, default_value = "vb")]
    pub mode: CalibrationMode,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Base instance count; each property scales from it.
    #[arg(long)]
    pub trials: Option<usize>,
}

fn read_text(path: &Path) -> Result<String> {
    let io = |e: std::io::Error| CrcError::Io { path: path.display().to_string(), message: e.to_string() };
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

/// Parses `key=value` lines; `#` starts a comment. Keys are normalised to
/// snake case so `n-test` and `n_test` are the same setting.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CrcError::Parse { line: i + 1, message: format!("expected key=value, got {line:?}") })?;
        out.push((k.trim().replace('-', "_"), v.trim().to_string()));
    }
    Ok(out)
}

fn value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| CrcError::Config(format!("bad value {v:?} for {key}")))
}

fn list(key: &str, v: &str) -> Result<Vec<usize>> {
    v.split(',').map(|x| value(key, x.trim())).collect()
}

fn apply_regression(cfg: &mut RegressionConfig, ns: &mut Vec<usize>, key: &str, v: &str) -> Result<()> {
    match key {
        "seed" => cfg.seed = value(key, v)?,
        "runs" | "n_runs" => cfg.n_runs = value(key, v)?,
        "n" | "n_train_total" => *ns = list(key, v)?,
        "k" | "n_folds" => cfg.n_folds = value(key, v)?,
        "alpha" => cfg.alpha = value(key, v)?,
        "n_test" => cfg.n_test = value(key, v)?,
        "vb_split" | "vb_split_fraction" => cfg.vb_split_fraction = value(key, v)?,
        "parallelism" => cfg.parallelism = value(key, v)?,
        "mu0" => cfg.mu0 = value(key, v)?,
        "gamma0" => cfg.gamma0 = value(key, v)?,
        "beta0" => cfg.beta0 = value(key, v)?,
        "d" => cfg.d = value(key, v)?,
        "m" => cfg.m = value(key, v)?,
        _ => return Err(CrcError::Config(format!("unknown regression setting {key:?}"))),
    }
    Ok(())
}

fn apply_tpp(cfg: &mut TppConfig, ns: &mut Vec<usize>, key: &str, v: &str) -> Result<()> {
    match key {
        "seed" => cfg.seed = value(key, v)?,
        "runs" | "n_runs" => cfg.n_runs = value(key, v)?,
        "n" | "n_train_total" => *ns = list(key, v)?,
        "k" | "n_folds" => cfg.n_folds = value(key, v)?,
        "k_equals_n" => cfg.k_equals_n = value(key, v)?,
        "alpha" => cfg.alpha = value(key, v)?,
        "n_test" => cfg.n_test = value(key, v)?,
        "vb_split" | "vb_split_fraction" => cfg.vb_split_fraction = value(key, v)?,
        "parallelism" => cfg.parallelism = value(key, v)?,
        "d" => cfg.d = value(key, v)?,
        "m" => cfg.m = value(key, v)?,
        "gamma" => cfg.gamma = value(key, v)?,
        "burn_in" => cfg.burn_in = value(key, v)?,
        "predictor_scale" => cfg.predictor_scale = value(key, v)?,
        "mu" => cfg.hawkes.mu = value(key, v)?,
        "alpha1" => cfg.hawkes.alpha1 = value(key, v)?,
        "alpha2" => cfg.hawkes.alpha2 = value(key, v)?,
        "beta1" => cfg.hawkes.beta1 = value(key, v)?,
        "beta2" => cfg.hawkes.beta2 = value(key, v)?,
        _ => return Err(CrcError::Config(format!("unknown tpp setting {key:?}"))),
    }
    Ok(())
}

/// Flag values as `(key, value)` pairs, applied after the config file.
fn flag_overrides(a: &ExperimentArgs) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    let mut push = |k: &'static str, v: Option<String>| {
        if let Some(v) = v {
            out.push((k, v));
        }
    };
    push("seed", a.seed.map(|x| x.to_string()));
    push("runs", a.runs.map(|x| x.to_string()));
    push("k", a.k.map(|x| x.to_string()));
    push("alpha", a.alpha.map(|x| x.to_string()));
    push("n_test", a.n_test.map(|x| x.to_string()));
    push("vb_split", a.vb_split.map(|x| x.to_string()));
    push("parallelism", a.parallelism.map(|x| x.to_string()));
    if !a.n.is_empty() {
        push("n", Some(a.n.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")));
    }
    out
}

fn layered<C>(
    args: &ExperimentArgs,
    mut cfg: C,
    ns: &mut Vec<usize>,
    apply: impl Fn(&mut C, &mut Vec<usize>, &str, &str) -> Result<()>,
) -> Result<C> {
    if let Some(path) = &args.config {
        for (k, v) in parse_config(&read_text(path)?)? {
            apply(&mut cfg, ns, &k, &v)?;
        }
    }
    for (k, v) in flag_overrides(args) {
        apply(&mut cfg, ns, k, &v)?;
    }
    Ok(cfg)
}

/// Resolved regression settings and the N sweep.
pub fn regression_config(args: &ExperimentArgs) -> Result<(RegressionConfig, Vec<usize>)> {
    let base = RegressionConfig::default();
    let mut ns = vec![base.n_train_total];
    let cfg = layered(args, base, &mut ns, apply_regression)?;
    Ok((cfg, ns))
}

pub fn tpp_config(args: &ExperimentArgs, k_equals_n: bool) -> Result<(TppConfig, Vec<usize>)> {
    let base = TppConfig::default();
    let mut ns = vec![base.n_train_total];
    let mut cfg = layered(args, base, &mut ns, apply_tpp)?;
    cfg.k_equals_n |= k_equals_n;
    Ok((cfg, ns))
}

fn cmd_regression(args: &ExperimentArgs, out: &mut dyn Write) -> Result<i32> {
    let (cfg, ns) = regression_config(args)?;
    let mut records = Vec::new();
    for &n in &ns {
        records.extend(run_regression_experiment(&RegressionConfig { n_train_total: n, ..cfg.clone() })?);
    }
    write_report(&args.out_dir, "regression", &records, cfg.alpha)?;
    report_written(out, &args.out_dir, "regression", records.len())
}

fn cmd_tpp(args: &ExperimentArgs, k_equals_n: bool, out: &mut dyn Write) -> Result<i32> {
    let (cfg, ns) = tpp_config(args, k_equals_n)?;
    let mut records = Vec::new();
    for &n in &ns {
        records.extend(run_tpp_experiment(&TppConfig { n_train_total: n, ..cfg.clone() })?);
    }
    write_report(&args.out_dir, "tpp", &records, cfg.alpha)?;
    report_written(out, &args.out_dir, "tpp", records.len())
}

fn report_written(out: &mut dyn Write, dir: &Path, stem: &str, rows: usize) -> Result<i32> {
    writeln!(out, "wrote {rows} rows to {}", dir.join(format!("{stem}.csv")).display()).map_err(stdout_err)?;
    Ok(0)
}

fn stdout_err(e: std::io::Error) -> CrcError {
    CrcError::Io { path: "<stdout>".into(), message: e.to_string() }
}

fn cmd_calibrate(args: &CalibrateArgs, out: &mut dyn Write) -> Result<i32> {
    let spec = LossSpec::new(args.lower, args.upper, args.alpha)?;
    let records = parse_curves(&read_text(&args.file)?)?;
    let r = calibrate(&records, &spec, args.mode)?;
    writeln!(out, "lambda={} risk={} feasible={}", format_lambda(r.lambda), r.risk_at_lambda, r.feasible)
        .map_err(stdout_err)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let mut cfg = VerifyConfig::default();
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    let outcomes = run_suite(&cfg)?;
    let mut failed = 0;
    for o in &outcomes {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        write!(out, "{status} {} checked={} failures={}", o.name, o.checked, o.failures).map_err(stdout_err)?;
        if let Some(d) = &o.detail {
            write!(out, " ({d})").map_err(stdout_err)?;
        }
        writeln!(out).map_err(stdout_err)?;
        failed += usize::from(!o.passed());
    }
    writeln!(out, "{} of {} properties passed", outcomes.len() - failed, outcomes.len()).map_err(stdout_err)?;
    Ok(if failed == 0 { 0 } else { 1 })
}

/// Runs a parsed command, writing its report to `out`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Regression(a) => cmd_regression(a, out),
        Command::Tpp { common, k_equals_n } => cmd_tpp(common, *k_equals_n, out),
        Command::Calibrate(a) => cmd_calibrate(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("cvcrc").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn fold_condition_error_names_min_k() {
        let cli = parse(&["regression", "--k", "5", "--alpha", "0.1", "--runs", "0"]);
        let Command::Regression(a) = &cli.command else { unreachable!() };
        let (cfg, _) = regression_config(a).unwrap();
        let err = cfg.validate().unwrap_err();
        assert_eq!(err, CrcError::FoldCondition { k: 5, min_k: 9 });
        assert!(err.to_string().contains("K >= 9"));
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.txt");
        std::fs::write(&path, "# sweep\nn = 20, 40\nalpha=0.2\nruns=3\nd = 10\n").unwrap();
        let cli = parse(&["regression", "--config", path.to_str().unwrap(), "--alpha", "0.1", "--n", "60"]);
        let Command::Regression(a) = &cli.command else { unreachable!() };
        let (cfg, ns) = regression_config(a).unwrap();
        assert_eq!((cfg.alpha, cfg.n_runs, cfg.d), (0.1, 3, 10));
        assert_eq!(ns, vec![60]);
        let cli = parse(&["regression", "--config", path.to_str().unwrap()]);
        let Command::Regression(a) = &cli.command else { unreachable!() };
        assert_eq!(regression_config(a).unwrap().1, vec![20, 40]);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(parse_config("a=1\nnonsense\n"), Err(CrcError::Parse { line: 2, .. })));
        let mut cfg = RegressionConfig::default();
        let mut ns = vec![];
        assert!(apply_regression(&mut cfg, &mut ns, "bogus", "1").is_err());
        assert!(apply_regression(&mut cfg, &mut ns, "alpha", "x").is_err());
    }

    #[test]
    fn tpp_k_equals_n_flag() {
        let cli = parse(&["tpp", "--alpha", "0.1667", "--k-equals-n", "--n", "12"]);
        let Command::Tpp { common, k_equals_n } = &cli.command else { unreachable!() };
        let (cfg, ns) = tpp_config(common, *k_equals_n).unwrap();
        assert!(cfg.k_equals_n);
        assert_eq!(TppConfig { n_train_total: ns[0], ..cfg }.folds(), 12);
    }
}
