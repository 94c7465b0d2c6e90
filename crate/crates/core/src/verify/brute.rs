use num_bigint::BigInt;
use num_rational::BigRational;

use crate::exact::{target_rational, Weight};
use crate::loss::LossCurve;

/// Smallest `λ` among `-∞`, every distinct breakpoint and `+∞` at which
/// `(Σ w_i ℓ_i(λ) + regularizer) / normalizer ≤ alpha`, each candidate
/// evaluated by direct summation over all curves. `+∞` when none qualifies.
pub fn brute_force_threshold(terms: &[(&Weight, &LossCurve)], regularizer: f64, alpha: f64, normalizer: u64) -> f64 {
    let exact = |x: f64| BigRational::from_float(x).expect("finite");
    let bound = target_rational(alpha) * BigRational::from_integer(BigInt::from(normalizer));

    let mut candidates: Vec<f64> = terms.iter().flat_map(|(_, c)| c.breakpoints()).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    candidates.insert(0, f64::NEG_INFINITY);
    candidates.push(f64::INFINITY);

    for lambda in candidates {
        let mut total = exact(regularizer);
        for (w, c) in terms {
            total += w.as_rational() * exact(c.evaluate(lambda));
        }
        if total <= bound {
            return lambda;
        }
    }
    f64::INFINITY
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_scores() {
        let w = Weight::one();
        let cs: Vec<LossCurve> = [3.0, 1.0, 2.0].iter().map(|&s| LossCurve::miscoverage(s).unwrap()).collect();
        let terms: Vec<_> = cs.iter().map(|c| (&w, c)).collect();
        assert_eq!(brute_force_threshold(&terms, 1.0, 0.5, 4), 2.0);
    }

    #[test]
    fn constant_curve() {
        // (b + B)/2 = 0.75 regardless of λ
        let (b, alpha) = (0.25, 0.25);
        let w = Weight::one();
        let c = LossCurve::constant(b);
        assert_eq!(brute_force_threshold(&[(&w, &c)], b + 1.0, alpha, 2), f64::INFINITY);
        assert_eq!(brute_force_threshold(&[(&w, &c)], b + 1.0, 0.75, 2), f64::NEG_INFINITY);
    }

    #[test]
    fn empty_list() {
        assert_eq!(brute_force_threshold(&[], 1.0, 1.0, 1), f64::NEG_INFINITY);
        assert_eq!(brute_force_threshold(&[], 1.0, 0.5, 1), f64::INFINITY);
    }
}
