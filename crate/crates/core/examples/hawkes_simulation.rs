//! Simulates the two-kernel exponential Hawkes process by thinning and checks
//! the long-run rate and the time-rescaling goodness of fit.
//!
//! Run with `cargo run --release --example hawkes_simulation`.

use cvcrc::tpp::{exponential_cdf, ks_test, rescaled_interarrivals, simulate_hawkes, HawkesParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> cvcrc::Result<()> {
    let params = HawkesParams::default();
    let horizon = 2e5;
    let seq = simulate_hawkes(&params, ChaCha8Rng::seed_from_u64(5), horizon, 0.0)?;
    println!("{} events on [0, {horizon}): rate {:.4}, stationary rate {:.4}", seq.len(), seq.len() as f64 / horizon, params.stationary_rate());

    let rescaled = rescaled_interarrivals(&params, 0.0, &seq);
    let (d, p) = ks_test(&rescaled, |x| exponential_cdf(x, 1.0));
    println!("rescaled inter-arrivals vs Exp(1): D = {d:.5}, p = {p:.3}");

    // the wrong model fails the same test
    let wrong = HawkesParams { alpha1: 0.0, alpha2: 0.0, mu: params.stationary_rate(), ..params };
    let (d, p) = ks_test(&rescaled_interarrivals(&wrong, 0.0, &seq), |x| exponential_cdf(x, 1.0));
    println!("rescaled under a Poisson model:    D = {d:.5}, p = {p:.3e}");
    Ok(())
}
