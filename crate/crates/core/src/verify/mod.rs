//! Independent oracles for the calibration machinery.
//!
//! Nothing here is needed to calibrate a predictor; these routines recompute
//! the same quantities along different paths (direct summation, explicit
//! leave-two-folds-out retraining, permutation enumeration, order
//! statistics) so the fast paths can be checked against them.

mod bag;
mod brute;
mod jackknife;
mod l2o;
mod suite;

pub use bag::{bag_decomposition, lemma1_expectation, lemma1_oracle, Bag, BagTerm};
pub use brute::brute_force_threshold;
pub use jackknife::jackknife_minmax_threshold;
pub use l2o::{fold_permutation_check, l2o_curves, l2o_risk, l2o_threshold, AugmentedDataset, FoldTrainer};
pub use suite::{cv_threshold_with, run_suite, PropertyOutcome, VerifyConfig};
