use crate::error::{CrcError, Result};

/// Fixed assignment of `N` examples to `K` equal contiguous folds.
///
/// Folds are 0-based here: example `i` (0-based) lands in fold `i * K / N`,
/// which is the 1-based rule `k[i] = ⌈iK/N⌉` shifted down by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPartition {
    n_total: usize,
    n_folds: usize,
    assignment: Vec<usize>,
}

impl FoldPartition {
    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_folds(&self) -> usize {
        self.n_folds
    }

    pub fn fold_size(&self) -> usize {
        self.n_total / self.n_folds
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn fold_of(&self, index: usize) -> usize {
        self.assignment[index]
    }

    /// Indices of the examples in fold `k`.
    pub fn members(&self, k: usize) -> std::ops::Range<usize> {
        let s = self.fold_size();
        k * s..(k + 1) * s
    }

    /// Indices of all examples outside fold `k`, in increasing order.
    pub fn complement(&self, k: usize) -> Vec<usize> {
        (0..self.n_total).filter(|&i| self.assignment[i] != k).collect()
    }
}

pub fn partition_folds(n_total: usize, n_folds: usize) -> Result<FoldPartition> {
    if n_folds < 2 || n_total < n_folds {
        return Err(CrcError::InvalidFolds(format!("need N >= K >= 2, got N = {n_total}, K = {n_folds}")));
    }
    if !n_total.is_multiple_of(n_folds) {
        return Err(CrcError::InvalidFolds(format!("N = {n_total} is not divisible by K = {n_folds}")));
    }
    let assignment = (0..n_total).map(|i| i * n_folds / n_total).collect();
    Ok(FoldPartition { n_total, n_folds, assignment })
}

/// Cross-validation set membership: the best (smallest) score across the
/// leave-fold-out models is at most `lambda`.
pub fn cv_membership(fold_scores: &[f64], lambda: f64) -> bool {
    fold_scores.iter().any(|&s| s <= lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_blocks() {
        let one_based = |p: FoldPartition| p.assignment().iter().map(|k| k + 1).collect::<Vec<_>>();
        assert_eq!(one_based(partition_folds(4, 2).unwrap()), vec![1, 1, 2, 2]);
        assert_eq!(one_based(partition_folds(6, 3).unwrap()), vec![1, 1, 2, 2, 3, 3]);
        assert!(partition_folds(5, 2).is_err());
        assert!(partition_folds(3, 1).is_err());
        assert!(partition_folds(2, 3).is_err());
    }

    #[test]
    fn matches_ceiling_rule() {
        for (n, k) in [(20, 4), (12, 12), (40, 20), (9, 3)] {
            let p = partition_folds(n, k).unwrap();
            for i in 1..=n {
                assert_eq!(p.fold_of(i - 1) + 1, (i * k).div_ceil(n));
            }
            for f in 0..k {
                assert!(p.members(f).all(|i| p.fold_of(i) == f));
                assert_eq!(p.complement(f).len(), n - n / k);
            }
        }
    }

    #[test]
    fn membership_uses_best_fold() {
        assert!(cv_membership(&[3.0, 1.0, 5.0], 1.0));
        assert!(!cv_membership(&[3.0, 1.0, 5.0], 0.99));
        assert!(cv_membership(&[2.0], 2.0));
        assert!(!cv_membership(&[], f64::INFINITY));
    }
}
