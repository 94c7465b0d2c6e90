use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use crate::exact::target_rational;

/// Jackknife-minmax threshold for miscoverage (`b = 0`, `B = 1`) from the
/// `N` leave-one-out scores.
///
/// At most `q = ⌊α(N + 1) − 1⌋` scores may exceed `λ`, so `λ` is the
/// `(N − q)`-th smallest score; `q ≥ N` admits every `λ` (`-∞`) and `q < 0`
/// admits none (`+∞`). `alpha` is read as the simplest fraction that rounds to it.
pub fn jackknife_minmax_threshold(loo_scores: &[f64], alpha: f64) -> f64 {
    let n = loo_scores.len();
    let slack = target_rational(alpha) * BigRational::from_integer(BigInt::from(n + 1))
        - BigRational::from_integer(BigInt::from(1));
    if slack.is_negative() {
        return f64::INFINITY;
    }
    let q = slack.floor().to_integer().to_usize().unwrap_or(usize::MAX);
    if q >= n {
        return f64::NEG_INFINITY;
    }
    let mut sorted = loo_scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[n - q - 1]
}
