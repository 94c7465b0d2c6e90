//! Text exchange format for per-example loss curves.
//!
//! One record per line: `fold_index,init_value,lambda_1:value_1,lambda_2:value_2,...`
//! with strictly increasing lambdas and strictly decreasing values. Fold `0`
//! marks validation-based data; cross-validation folds are numbered `1..=K`.
//! Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{CrcError, Result};
use crate::loss::{LossCurve, LossSpec};
use crate::threshold::{cv_threshold, vb_threshold, CalibrationBatch, ThresholdResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationMode {
    Vb,
    Cv,
}

impl FromStr for CalibrationMode {
    type Err = CrcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vb" => Ok(CalibrationMode::Vb),
            "cv" => Ok(CalibrationMode::Cv),
            other => Err(CrcError::Config(format!("unknown calibration mode {other:?}, expected vb or cv"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRecord {
    pub fold: usize,
    pub curve: LossCurve,
}

fn number(line: usize, field: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| CrcError::Parse { line, message: format!("not a number: {:?}", field.trim()) })?;
    if v.is_nan() {
        return Err(CrcError::Parse { line, message: "NaN is not allowed".into() });
    }
    Ok(v)
}

fn parse_line(line: usize, text: &str) -> Result<CurveRecord> {
    let mut fields = text.split(',');
    let fold = fields
        .next()
        .unwrap_or_default()
        .trim()
        .parse::<usize>()
        .map_err(|_| CrcError::Parse { line, message: "fold index must be a nonnegative integer".into() })?;
    let initial = number(
        line,
        fields.next().ok_or_else(|| CrcError::Parse { line, message: "missing init_value".into() })?,
    )?;
    let mut steps: Vec<(f64, f64)> = Vec::new();
    for field in fields {
        let (l, v) = field
            .split_once(':')
            .ok_or_else(|| CrcError::Parse { line, message: format!("expected lambda:value, got {:?}", field.trim()) })?;
        let (l, v) = (number(line, l)?, number(line, v)?);
        let (prev_l, prev_v) = steps.last().map_or((f64::NEG_INFINITY, initial), |&(a, b)| (a, b));
        if l <= prev_l {
            return Err(CrcError::Parse { line, message: format!("lambda {l} does not increase") });
        }
        if v >= prev_v {
            return Err(CrcError::Parse { line, message: format!("value {v} does not decrease") });
        }
        steps.push((l, v));
    }
    let curve = LossCurve::new(initial, steps).map_err(|e| CrcError::Parse { line, message: e.to_string() })?;
    Ok(CurveRecord { fold, curve })
}

pub fn parse_curves(text: &str) -> Result<Vec<CurveRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| parse_line(i + 1, l))
        .collect()
}

/// Writes records back in the exchange format, one per line.
pub fn format_curves(records: &[CurveRecord]) -> String {
    let mut out = String::new();
    for r in records {
        write!(out, "{},{}", r.fold, r.curve.initial_value()).unwrap();
        for (l, v) in r.curve.steps() {
            write!(out, ",{l}:{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Calibrates a threshold from parsed records. Validation mode requires every
/// record in fold 0; cross-validation mode requires folds `1..=K` of equal size.
pub fn calibrate(records: &[CurveRecord], spec: &LossSpec, mode: CalibrationMode) -> Result<ThresholdResult> {
    match mode {
        CalibrationMode::Vb => {
            if let Some(r) = records.iter().find(|r| r.fold != 0) {
                return Err(CrcError::InvalidFolds(format!("vb mode expects fold 0, found fold {}", r.fold)));
            }
            let curves = records.iter().map(|r| r.curve.clone()).collect();
            vb_threshold(&CalibrationBatch::unweighted(curves), spec)
        }
        CalibrationMode::Cv => {
            if records.iter().any(|r| r.fold == 0) {
                return Err(CrcError::InvalidFolds("cv mode expects folds numbered from 1".into()));
            }
            let k = records.iter().map(|r| r.fold).max().unwrap_or(0);
            if k == 0 {
                return Err(CrcError::Empty("cv mode needs at least one fold".into()));
            }
            let mut folds = vec![Vec::new(); k];
            for r in records {
                folds[r.fold - 1].push(r.curve.clone());
            }
            cv_threshold(&folds, spec, records.len(), k)
        }
    }
}

pub fn format_lambda(lambda: f64) -> String {
    if lambda == f64::NEG_INFINITY {
        "-inf".into()
    } else if lambda == f64::INFINITY {
        "+inf".into()
    } else {
        lambda.to_string()
    }
}
