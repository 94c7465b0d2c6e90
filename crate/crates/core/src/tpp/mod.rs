//! Temporal point-process prediction with Hawkes-generated event times.
//!
//! After `d` observed event times the next `m` times are predicted, each by
//! an interval whose half-width grows geometrically with the step:
//! `γ^j λ / 2` for the `j`-th predicted event.

mod experiment;
mod hawkes;
mod ks;
mod predictor;

pub use experiment::{run_tpp_experiment, run_tpp_once, tpp_loss_curve, windows, TppConfig, TppExample};
pub use hawkes::{hawkes_intensity, rescaled_interarrivals, simulate_hawkes, EventSequence, HawkesParams, HawkesSimulator};
pub use ks::{exponential_cdf, kolmogorov_pvalue, ks_statistic, ks_test};
pub use predictor::{fit_median_predictor, rollout_predict, MedianPredictor};
