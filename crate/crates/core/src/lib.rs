//! Conformal risk control with validation-based (VB) and cross-validation-based
//! (CV) calibration.
//!
//! Every per-example loss is represented as a [`LossCurve`]: a right-continuous,
//! nonincreasing step function of the threshold `λ`. The regularized risk
//! estimators are then piecewise constant in `λ`, so the calibrated threshold
//! (the infimum of all `λ` meeting the target) is found exactly by sweeping the
//! merged breakpoints. Sums are accumulated in exact rational arithmetic, which
//! makes the selected breakpoint independent of summation order.
//!
//! Module map:
//!
//! - [`loss`], [`threshold`], [`folds`]: curves, the VB/CV estimators and thresholds,
//!   fold partitioning and CV set membership.
//! - [`intervals`]: unions of closed intervals and per-dimension box sets.
//! - [`verify`]: independent oracles (brute-force threshold, leave-two-folds-out
//!   threshold, exchangeability bag oracle, jackknife-minmax reference) and the
//!   property suite built on them.
//! - [`regression`]: the hierarchical Gaussian vector-regression experiment.
//! - [`tpp`]: Hawkes simulation and the point-process interval experiment.
//! - [`experiment`], [`report`], [`curvefile`], [`cli`]: Monte Carlo harness,
//!   CSV/SVG output, the loss-curve text format and the command-line front end.

pub mod cli;
pub mod curvefile;
mod error;
mod exact;
pub mod experiment;
pub mod folds;
pub mod intervals;
pub mod loss;
pub mod regression;
pub mod report;
pub mod threshold;
pub mod tpp;
pub mod verify;

pub use error::{CrcError, Result};
pub use exact::Weight;
pub use folds::{cv_membership, partition_folds, FoldPartition};
pub use intervals::{BoxSet, IntervalUnion};
pub use loss::{evaluate_curve, LossCurve, LossSpec};
pub use threshold::{
    check_fold_condition, cv_threshold, min_folds, vb_threshold, CalibrationBatch,
    ThresholdResult,
};
