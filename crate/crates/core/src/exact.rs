//! Exact rational accumulation of `f64` loss values.
//!
//! Every finite `f64` is a dyadic rational, so sums and weighted sums of loss
//! values can be carried out without rounding. Threshold selection compares
//! these exact sums against `alpha * normalizer`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Positive per-curve weight in an estimator, held exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight(BigRational);

impl Weight {
    pub fn one() -> Self {
        Weight(BigRational::from_integer(BigInt::from(1)))
    }

    /// `num / den`, e.g. the `K/N` cross-validation weight.
    pub fn ratio(num: u64, den: u64) -> Self {
        assert!(num > 0 && den > 0, "weight must be positive");
        Weight(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact value of a positive finite float.
    pub fn from_f64(w: f64) -> Option<Self> {
        if w.is_finite() && w > 0.0 {
            BigRational::from_float(w).map(Weight)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub(crate) fn as_rational(&self) -> &BigRational {
        &self.0
    }
}

pub(crate) fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

/// Simplest rational that rounds to `x`: the first continued-fraction
/// convergent of `x` whose nearest `f64` is `x` itself. Risk targets are read
/// this way, so `1.0 / 6.0` means one sixth and `0.1` means one tenth.
pub(crate) fn target_rational(x: f64) -> BigRational {
    let exact = rational(x);
    let (mut h0, mut h1) = (BigInt::from(0), BigInt::from(1));
    let (mut k0, mut k1) = (BigInt::from(1), BigInt::from(0));
    let mut rest = exact.clone();
    loop {
        let a = rest.floor();
        let a_int = a.to_integer();
        let h = &a_int * &h1 + &h0;
        let k = &a_int * &k1 + &k0;
        let candidate = BigRational::new(h.clone(), k.clone());
        let frac = &rest - &a;
        if to_f64(&candidate) == x || frac.is_zero() {
            return candidate;
        }
        rest = frac.recip();
        (h0, h1, k0, k1) = (h1, h, k1, k);
    }
}

pub(crate) fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Running exact sum.
#[derive(Debug, Clone)]
pub(crate) struct ExactSum(BigRational);

impl ExactSum {
    pub fn zero() -> Self {
        ExactSum(BigRational::zero())
    }

    pub fn add_f64(&mut self, x: f64) {
        self.0 += rational(x);
    }

    pub fn add_weighted(&mut self, w: &Weight, x: f64) {
        if x != 0.0 {
            self.0 += w.as_rational() * rational(x);
        }
    }

    pub fn sub_weighted(&mut self, w: &Weight, x: &BigRational) {
        self.0 -= w.as_rational() * x;
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }
}
