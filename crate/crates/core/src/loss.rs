//! Loss bounds and per-example loss curves `λ ↦ ℓ(y, Γ_λ(x))`.

use crate::error::{CrcError, Result};

/// Loss bounds `b ≤ ℓ ≤ B` and the target average loss `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSpec {
    lower: f64,
    upper: f64,
    alpha: f64,
}

impl LossSpec {
    pub fn new(lower: f64, upper: f64, alpha: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && alpha.is_finite()) {
            return Err(CrcError::InvalidSpec(format!(
                "bounds and target must be finite (b = {lower}, B = {upper}, alpha = {alpha})"
            )));
        }
        if lower >= upper {
            return Err(CrcError::InvalidSpec(format!("need b < B, got b = {lower}, B = {upper}")));
        }
        if alpha < lower || alpha > upper {
            return Err(CrcError::InvalidSpec(format!(
                "need b <= alpha <= B, got alpha = {alpha} with [{lower}, {upper}]"
            )));
        }
        Ok(LossSpec { lower, upper, alpha })
    }

    /// Losses in `[0, 1]` (miscoverage, fraction of missed entries).
    pub fn unit(alpha: f64) -> Result<Self> {
        Self::new(0.0, 1.0, alpha)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.lower, self.upper, alpha)
    }

    pub(crate) fn check_value(&self, value: f64) -> Result<()> {
        if value < self.lower || value > self.upper {
            Err(CrcError::LossOutOfBounds { value, lower: self.lower, upper: self.upper })
        } else {
            Ok(())
        }
    }
}

/// Right-continuous nonincreasing step function of the threshold.
///
/// The value is `initial` for `λ` below the first breakpoint and
/// `steps[i].1` on `[steps[i].0, steps[i + 1].0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossCurve {
    initial: f64,
    steps: Vec<(f64, f64)>,
}

impl LossCurve {
    /// Validates strictly increasing breakpoints and strictly decreasing values.
    pub fn new(initial: f64, steps: Vec<(f64, f64)>) -> Result<Self> {
        if !initial.is_finite() {
            return Err(CrcError::InvalidCurve(format!("initial value {initial} is not finite")));
        }
        let mut prev_lambda = f64::NEG_INFINITY;
        let mut prev_value = initial;
        for (i, &(lambda, value)) in steps.iter().enumerate() {
            if !lambda.is_finite() || !value.is_finite() {
                return Err(CrcError::InvalidCurve(format!("breakpoint {i} is not finite")));
            }
            if lambda <= prev_lambda {
                return Err(CrcError::InvalidCurve(format!(
                    "breakpoint {i}: lambda {lambda} does not increase past {prev_lambda}"
                )));
            }
            let decreasing = if i == 0 { value <= prev_value } else { value < prev_value };
            if !decreasing {
                return Err(CrcError::InvalidCurve(format!(
                    "breakpoint {i}: value {value} does not decrease from {prev_value}"
                )));
            }
            prev_lambda = lambda;
            prev_value = value;
        }
        Ok(LossCurve { initial, steps })
    }

    pub fn constant(value: f64) -> Self {
        assert!(value.is_finite());
        LossCurve { initial: value, steps: Vec::new() }
    }

    /// Miscoverage `1(score > λ)`: 1 below the score, 0 from the score on.
    pub fn miscoverage(score: f64) -> Result<Self> {
        Self::new(1.0, vec![(score, 0.0)])
    }

    /// Fraction of entries not yet covered, where entry `j` is covered for
    /// `λ ≥ thresholds[j]`. Coincident thresholds are merged into one drop.
    /// Values are computed as `uncovered / m`, the same expression used when
    /// the fraction loss is evaluated on an explicit set.
    pub fn fraction_uncovered(thresholds: &[f64]) -> Result<Self> {
        let m = thresholds.len();
        if m == 0 {
            return Err(CrcError::Empty("fraction loss needs at least one entry".into()));
        }
        if let Some(t) = thresholds.iter().find(|t| t.is_nan() || **t == f64::NEG_INFINITY) {
            return Err(CrcError::InvalidCurve(format!("coverage threshold {t}")));
        }
        let mut sorted: Vec<f64> = thresholds.iter().copied().filter(|t| t.is_finite()).collect();
        sorted.sort_by(f64::total_cmp);
        let mut steps: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        let mut covered = 0usize;
        for (i, &t) in sorted.iter().enumerate() {
            covered += 1;
            if sorted.get(i + 1) == Some(&t) {
                continue;
            }
            steps.push((t, (m - covered) as f64 / m as f64));
        }
        Ok(LossCurve { initial: 1.0, steps })
    }

    pub fn initial_value(&self) -> f64 {
        self.initial
    }

    /// Value as `λ → +∞`.
    pub fn terminal_value(&self) -> f64 {
        self.steps.last().map_or(self.initial, |s| s.1)
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(|s| s.0)
    }

    pub fn evaluate(&self, lambda: f64) -> f64 {
        let idx = self.steps.partition_point(|s| s.0 <= lambda);
        if idx == 0 {
            self.initial
        } else {
            self.steps[idx - 1].1
        }
    }

    pub fn min_value(&self) -> f64 {
        self.terminal_value()
    }

    pub fn max_value(&self) -> f64 {
        self.initial
    }

    pub(crate) fn check_bounds(&self, spec: &LossSpec) -> Result<()> {
        spec.check_value(self.initial)?;
        spec.check_value(self.terminal_value())
    }

    /// Pointwise minimum of nonincreasing step functions.
    pub fn pointwise_min<'a, I>(curves: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a LossCurve>,
    {
        let curves: Vec<&LossCurve> = curves.into_iter().collect();
        if curves.is_empty() {
            return None;
        }
        let eval = |lambda: f64| curves.iter().map(|c| c.evaluate(lambda)).fold(f64::INFINITY, f64::min);
        let mut knots: Vec<f64> = curves.iter().flat_map(|c| c.breakpoints()).collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let initial = curves.iter().map(|c| c.initial).fold(f64::INFINITY, f64::min);
        let mut steps = Vec::new();
        let mut current = initial;
        for lambda in knots {
            let v = eval(lambda);
            if v < current {
                steps.push((lambda, v));
                current = v;
            }
        }
        Some(LossCurve { initial, steps })
    }
}

/// Value of `curve` at an extended-real threshold.
pub fn evaluate_curve(curve: &LossCurve, lambda: f64) -> f64 {
    curve.evaluate(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(init: f64, steps: &[(f64, f64)]) -> LossCurve {
        LossCurve::new(init, steps.to_vec()).unwrap()
    }

    #[test]
    fn right_continuous_evaluation() {
        let c = curve(1.0, &[(2.0, 0.0)]);
        assert_eq!(evaluate_curve(&c, 2.0), 0.0);
        assert_eq!(evaluate_curve(&c, 1.9), 1.0);
        let c = curve(1.0, &[(1.0, 0.5), (3.0, 0.0)]);
        assert_eq!(evaluate_curve(&c, 2.0), 0.5);
        assert_eq!(evaluate_curve(&c, f64::INFINITY), 0.0);
        assert_eq!(evaluate_curve(&c, f64::NEG_INFINITY), 1.0);
    }

    #[test]
    fn rejects_malformed_curves() {
        assert!(LossCurve::new(1.0, vec![(2.0, 0.5), (2.0, 0.0)]).is_err());
        assert!(LossCurve::new(1.0, vec![(2.0, 0.5), (1.0, 0.0)]).is_err());
        assert!(LossCurve::new(1.0, vec![(1.0, 0.5), (2.0, 0.5)]).is_err());
        assert!(LossCurve::new(0.5, vec![(1.0, 0.7)]).is_err());
        assert!(LossCurve::new(1.0, vec![(f64::INFINITY, 0.0)]).is_err());
        assert!(LossCurve::new(f64::NAN, vec![]).is_err());
        // initial may equal the first value
        assert!(LossCurve::new(1.0, vec![(1.0, 1.0), (2.0, 0.0)]).is_ok());
    }

    #[test]
    fn spec_validation() {
        assert!(LossSpec::new(0.0, 1.0, 0.1).is_ok());
        assert!(LossSpec::new(1.0, 1.0, 1.0).is_err());
        assert!(LossSpec::new(0.0, 1.0, 1.5).is_err());
        assert!(LossSpec::new(f64::NEG_INFINITY, 1.0, 0.5).is_err());
    }

    #[test]
    fn fraction_curve_merges_duplicates() {
        let c = LossCurve::fraction_uncovered(&[2.0, 2.0]).unwrap();
        assert_eq!(c, curve(1.0, &[(2.0, 0.0)]));
        let c = LossCurve::fraction_uncovered(&[6.0]).unwrap();
        assert_eq!(c, curve(1.0, &[(6.0, 0.0)]));
        let c = LossCurve::fraction_uncovered(&[8.0, 2.0]).unwrap();
        assert_eq!(c, curve(1.0, &[(2.0, 0.5), (8.0, 0.0)]));
        // infinite thresholds never cover
        let c = LossCurve::fraction_uncovered(&[1.0, f64::INFINITY]).unwrap();
        assert_eq!(c, curve(1.0, &[(1.0, 0.5)]));
    }

    #[test]
    fn pointwise_min_of_steps() {
        let a = curve(1.0, &[(1.0, 0.5), (5.0, 0.0)]);
        let b = curve(1.0, &[(3.0, 0.0)]);
        let m = LossCurve::pointwise_min([&a, &b]).unwrap();
        assert_eq!(m, curve(1.0, &[(1.0, 0.5), (3.0, 0.0)]));
        for l in [-1.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 9.0] {
            assert_eq!(m.evaluate(l), a.evaluate(l).min(b.evaluate(l)));
        }
        assert!(LossCurve::pointwise_min(std::iter::empty()).is_none());
    }
}
