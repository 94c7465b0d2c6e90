//! Finite unions of closed real intervals and per-dimension products of them.

use crate::error::{CrcError, Result};

/// Sorted, disjoint closed intervals. Overlapping or touching inputs are merged.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalUnion {
    parts: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion::default()
    }

    pub fn full() -> Self {
        IntervalUnion { parts: vec![(f64::NEG_INFINITY, f64::INFINITY)] }
    }

    /// Canonical union of `[lo, hi]` pieces; pieces with `lo > hi` (or NaN ends) are empty.
    pub fn from_intervals<I: IntoIterator<Item = (f64, f64)>>(pieces: I) -> Self {
        let mut v: Vec<(f64, f64)> = pieces.into_iter().filter(|(lo, hi)| lo <= hi).collect();
        v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut parts: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (lo, hi) in v {
            match parts.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => parts.push((lo, hi)),
            }
        }
        IntervalUnion { parts }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, y: f64) -> bool {
        let idx = self.parts.partition_point(|p| p.0 <= y);
        idx > 0 && y <= self.parts[idx - 1].1
    }

    /// Lebesgue measure; `+∞` for unbounded unions.
    pub fn measure(&self) -> f64 {
        self.parts.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion::from_intervals(self.parts.iter().chain(other.parts.iter()).copied())
    }
}

/// Product set `Γ_1 × … × Γ_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    per_dim: Vec<IntervalUnion>,
}

impl BoxSet {
    pub fn new(per_dim: Vec<IntervalUnion>) -> Self {
        BoxSet { per_dim }
    }

    /// Union over models of `[c_kj - h_j, c_kj + h_j]` in every dimension `j`.
    ///
    /// Negative or `-∞` half-widths give empty dimensions, `+∞` gives the full line.
    pub fn centered<C: AsRef<[f64]>>(centers: &[C], half_widths: &[f64]) -> Self {
        let per_dim = half_widths
            .iter()
            .enumerate()
            .map(|(j, &h)| {
                if h == f64::INFINITY {
                    IntervalUnion::full()
                } else {
                    IntervalUnion::from_intervals(centers.iter().map(|c| {
                        let c = c.as_ref()[j];
                        (c - h, c + h)
                    }))
                }
            })
            .collect();
        BoxSet { per_dim }
    }

    pub fn dims(&self) -> usize {
        self.per_dim.len()
    }

    pub fn dim(&self, j: usize) -> &IntervalUnion {
        &self.per_dim[j]
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.len() == self.per_dim.len() && self.per_dim.iter().zip(y).all(|(g, &v)| g.contains(v))
    }
}

/// Fraction of the entries of `y` falling outside their dimension's set.
pub fn fraction_loss(y: &[f64], set: &BoxSet) -> Result<f64> {
    if y.len() != set.dims() || y.is_empty() {
        return Err(CrcError::ShapeMismatch(format!(
            "label has {} entries, set has {} dimensions",
            y.len(),
            set.dims()
        )));
    }
    let missed = y.iter().zip(&set.per_dim).filter(|(v, g)| !g.contains(**v)).count();
    Ok(missed as f64 / y.len() as f64)
}

/// Mean per-dimension measure of the set.
pub fn inefficiency(set: &BoxSet) -> f64 {
    if set.per_dim.is_empty() {
        return 0.0;
    }
    set.per_dim.iter().map(IntervalUnion::measure).sum::<f64>() / set.per_dim.len() as f64
}
