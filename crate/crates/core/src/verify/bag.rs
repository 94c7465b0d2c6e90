//! Exact bag computation for exchangeable vectors built as a finite mixture
//! of uniformly permuted base vectors.
//!
//! Conditioning on the bag (the multiset of values) makes every position
//! equally likely to hold each element, so `E[v_m | bag]` is the bag mean.
//! When every base vector has mean at most `α`, so does every bag, and hence
//! `E[v_m] ≤ α`.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{CrcError, Result};

/// Largest vector length accepted (all `M!` orderings are enumerated).
pub const MAX_BAG_LEN: usize = 8;

/// Multiset of reals; equality ignores order but respects multiplicity.
#[derive(Debug, Clone)]
pub struct Bag {
    sorted: Vec<f64>,
}

impl Bag {
    pub fn new(elements: &[f64]) -> Self {
        let mut sorted = elements.to_vec();
        sorted.sort_by(f64::total_cmp);
        Bag { sorted }
    }

    pub fn elements(&self) -> &[f64] {
        &self.sorted
    }

    fn key(&self) -> Vec<u64> {
        self.sorted.iter().map(|v| v.to_bits()).collect()
    }
}

impl PartialEq for Bag {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Bag {}

/// One bag of the mixture: its probability and `E[v_m | bag]`.
#[derive(Debug, Clone)]
pub struct BagTerm {
    pub bag: Bag,
    pub probability: f64,
    pub conditional_mean: f64,
    /// Whether `E[v_m | bag]` equals the bag mean exactly.
    pub matches_bag_mean: bool,
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn check_inputs(base_vectors: &[Vec<f64>], mix_weights: &[f64], m_index: usize) -> Result<usize> {
    let len = base_vectors.first().map(Vec::len).ok_or_else(|| CrcError::Empty("no base vectors".into()))?;
    if base_vectors.len() != mix_weights.len() {
        return Err(CrcError::ShapeMismatch("one mixture weight per base vector".into()));
    }
    if len == 0 || len > MAX_BAG_LEN || base_vectors.iter().any(|v| v.len() != len) {
        return Err(CrcError::ShapeMismatch(format!("base vectors must share a length in 1..={MAX_BAG_LEN}")));
    }
    if m_index >= len {
        return Err(CrcError::ShapeMismatch(format!("index {m_index} out of range for length {len}")));
    }
    if base_vectors.iter().flatten().chain(mix_weights).any(|v| !v.is_finite()) {
        return Err(CrcError::NonFinite("base vectors or weights".into()));
    }
    if mix_weights.iter().any(|&w| w < 0.0) || (mix_weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(CrcError::Hypothesis("mixture weights must be a probability vector".into()));
    }
    Ok(len)
}

struct Accum {
    bag: Bag,
    prob: BigRational,
    weighted_vm: BigRational,
}

/// Enumerates every ordering of every base vector, groups the orderings by
/// bag and returns, per bag, `P(bag)` and `E[v_m | bag]`.
pub fn bag_decomposition(base_vectors: &[Vec<f64>], mix_weights: &[f64], m_index: usize) -> Result<Vec<BagTerm>> {
    let len = check_inputs(base_vectors, mix_weights, m_index)?;
    let n_perms: u64 = (1..=len as u64).product();
    let mut bags: Vec<Accum> = Vec::new();
    for (v, &w) in base_vectors.iter().zip(mix_weights) {
        if w == 0.0 {
            continue;
        }
        let p_each = exact(w) / BigRational::from_integer(BigInt::from(n_perms));
        let bag = Bag::new(v);
        let slot = match bags.iter().position(|b| b.bag == bag) {
            Some(i) => i,
            None => {
                bags.push(Accum { bag, prob: BigRational::zero(), weighted_vm: BigRational::zero() });
                bags.len() - 1
            }
        };
        for perm in (0..len).permutations(len) {
            bags[slot].prob += &p_each;
            bags[slot].weighted_vm += &p_each * exact(v[perm[m_index]]);
        }
    }
    Ok(bags
        .into_iter()
        .map(|a| {
            let cond = &a.weighted_vm / &a.prob;
            let bag_mean = a.bag.sorted.iter().map(|&x| exact(x)).fold(BigRational::zero(), |s, x| s + x)
                / BigRational::from_integer(BigInt::from(len));
            BagTerm {
                probability: a.prob.to_f64().unwrap_or(f64::NAN),
                conditional_mean: cond.to_f64().unwrap_or(f64::NAN),
                matches_bag_mean: cond == bag_mean,
                bag: a.bag,
            }
        })
        .collect())
}

fn expectation_exact(base_vectors: &[Vec<f64>], mix_weights: &[f64], m_index: usize) -> Result<BigRational> {
    let len = check_inputs(base_vectors, mix_weights, m_index)?;
    let n_perms: u64 = (1..=len as u64).product();
    let mut total = BigRational::zero();
    for (v, &w) in base_vectors.iter().zip(mix_weights) {
        let mut s = BigRational::zero();
        for perm in (0..len).permutations(len) {
            s += exact(v[perm[m_index]]);
        }
        total += exact(w) * s / BigRational::from_integer(BigInt::from(n_perms));
    }
    Ok(total)
}

/// `E[v_m]` of the mixture, by enumerating all orderings. No hypothesis check.
pub fn lemma1_expectation(base_vectors: &[Vec<f64>], mix_weights: &[f64], m_index: usize) -> Result<f64> {
    Ok(expectation_exact(base_vectors, mix_weights, m_index)?.to_f64().unwrap_or(f64::NAN))
}

/// Returns `(E[v_m], α)` after checking that every base vector has mean at most `α`.
pub fn lemma1_oracle(base_vectors: &[Vec<f64>], mix_weights: &[f64], m_index: usize, alpha: f64) -> Result<(f64, f64)> {
    let len = check_inputs(base_vectors, mix_weights, m_index)?;
    let bound = exact(alpha);
    for (i, v) in base_vectors.iter().enumerate() {
        let mean = v.iter().map(|&x| exact(x)).fold(BigRational::zero(), |s, x| s + x)
            / BigRational::from_integer(BigInt::from(len));
        if mean > bound {
            return Err(CrcError::Hypothesis(format!("base vector {i} has mean above alpha = {alpha}")));
        }
    }
    Ok((lemma1_expectation(base_vectors, mix_weights, m_index)?, alpha))
}
