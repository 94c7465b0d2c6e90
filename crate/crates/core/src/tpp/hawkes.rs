use rand::Rng;

use crate::error::{CrcError, Result};

/// Two-exponential-kernel Hawkes intensity
/// `λ(t) = μ + Σ_{t_i < t} (α1 β1 e^{−β1 (t − t_i)} + α2 β2 e^{−β2 (t − t_i)})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HawkesParams {
    pub mu: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl Default for HawkesParams {
    fn default() -> Self {
        HawkesParams { mu: 0.2, alpha1: 0.4, alpha2: 0.4, beta1: 1.0, beta2: 20.0 }
    }
}

impl HawkesParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.mu > 0.0
            && self.alpha1 >= 0.0
            && self.alpha2 >= 0.0
            && self.beta1 > 0.0
            && self.beta2 > 0.0
            && self.alpha1 + self.alpha2 < 1.0;
        if ok && [self.mu, self.alpha1, self.alpha2, self.beta1, self.beta2].iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(CrcError::Config(format!("Hawkes parameters must be positive and subcritical: {self:?}")))
        }
    }

    /// Long-run event rate `μ / (1 − α1 − α2)`.
    pub fn stationary_rate(&self) -> f64 {
        self.mu / (1.0 - self.alpha1 - self.alpha2)
    }
}

/// Strictly increasing event times.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventSequence {
    times: Vec<f64>,
}

impl EventSequence {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.iter().any(|t| !t.is_finite()) {
            return Err(CrcError::NonFinite("event time".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CrcError::InvalidCurve("event times must be strictly increasing".into()));
        }
        Ok(EventSequence { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub fn hawkes_intensity(params: &HawkesParams, t: f64, history: &EventSequence) -> f64 {
    params.mu
        + history
            .times()
            .iter()
            .filter(|&&ti| ti < t)
            .map(|&ti| {
                let lag = t - ti;
                params.alpha1 * params.beta1 * (-params.beta1 * lag).exp()
                    + params.alpha2 * params.beta2 * (-params.beta2 * lag).exp()
            })
            .sum::<f64>()
}

/// Thinning sampler started at time 0 with an empty history.
///
/// `s1`, `s2` hold `Σ e^{−β (t − t_i)}` over past events at the current time,
/// so the intensity is `μ + α1 β1 s1 + α2 β2 s2`. Between events it only
/// decays, which makes the intensity at the current time a valid bound for
/// the next candidate; the bound is refreshed after every candidate.
pub struct HawkesSimulator<R> {
    params: HawkesParams,
    rng: R,
    t: f64,
    s1: f64,
    s2: f64,
}

impl<R: Rng> HawkesSimulator<R> {
    pub fn new(params: HawkesParams, rng: R) -> Result<Self> {
        params.validate()?;
        Ok(HawkesSimulator { params, rng, t: 0.0, s1: 0.0, s2: 0.0 })
    }

    fn intensity_now(&self) -> f64 {
        let p = &self.params;
        p.mu + p.alpha1 * p.beta1 * self.s1 + p.alpha2 * p.beta2 * self.s2
    }

    /// Time of the next accepted event.
    pub fn next_event(&mut self) -> f64 {
        loop {
            let bound = self.intensity_now();
            // Exp(bound) waiting time; 1 - u lies in (0, 1]
            let wait = -(1.0 - self.rng.random::<f64>()).ln() / bound;
            self.s1 *= (-self.params.beta1 * wait).exp();
            self.s2 *= (-self.params.beta2 * wait).exp();
            self.t += wait;
            if self.rng.random::<f64>() * bound <= self.intensity_now() {
                self.s1 += 1.0;
                self.s2 += 1.0;
                return self.t;
            }
        }
    }
}

/// Events on `[burn_in, burn_in + horizon)`; earlier events shape the
/// intensity but are not returned.
pub fn simulate_hawkes<R: Rng>(params: &HawkesParams, rng: R, horizon: f64, burn_in: f64) -> Result<EventSequence> {
    if !(horizon > 0.0 && burn_in >= 0.0) {
        return Err(CrcError::Config(format!("need horizon > 0 and burn_in >= 0, got {horizon}, {burn_in}")));
    }
    let mut sim = HawkesSimulator::new(*params, rng)?;
    let end = burn_in + horizon;
    let mut times = Vec::new();
    loop {
        let t = sim.next_event();
        if t >= end {
            break;
        }
        if t >= burn_in {
            times.push(t);
        }
    }
    EventSequence::new(times)
}

/// Compensator increments `Λ(t_{i−1}, t_i)` for a sequence whose history is
/// empty before `origin` (with `t_0 = origin`). Under the true model these
/// are i.i.d. Exp(1).
pub fn rescaled_interarrivals(params: &HawkesParams, origin: f64, events: &EventSequence) -> Vec<f64> {
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut prev = origin;
    let mut out = Vec::with_capacity(events.len());
    for &t in events.times() {
        let dt = t - prev;
        let (e1, e2) = ((-params.beta1 * dt).exp(), (-params.beta2 * dt).exp());
        out.push(params.mu * dt + params.alpha1 * s1 * (1.0 - e1) + params.alpha2 * s2 * (1.0 - e2));
        s1 = s1 * e1 + 1.0;
        s2 = s2 * e2 + 1.0;
        prev = t;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tpp::{exponential_cdf, ks_test};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn intensity_values() {
        let p = HawkesParams::default();
        assert_eq!(hawkes_intensity(&p, 3.0, &EventSequence::default()), 0.2);
        let h = EventSequence::new(vec![1.0]).unwrap();
        assert!((hawkes_intensity(&p, 1.0 + 1e-12, &h) - 8.6).abs() < 1e-9);
        assert!((hawkes_intensity(&p, 1e4, &h) - 0.2).abs() < 1e-15);
        // events at or after t do not count
        assert_eq!(hawkes_intensity(&p, 1.0, &h), 0.2);
    }

    #[test]
    fn simulated_times_increase_and_skip_burn_in() {
        let p = HawkesParams::default();
        let seq = simulate_hawkes(&p, ChaCha8Rng::seed_from_u64(5), 500.0, 50.0).unwrap();
        assert!(!seq.is_empty());
        assert!(seq.times().windows(2).all(|w| w[0] < w[1]));
        assert!(seq.times().iter().all(|&t| (50.0..550.0).contains(&t)));
    }

    #[test]
    fn simulator_matches_direct_intensity() {
        // the recursive kernel sums agree with the direct formula along a path
        let p = HawkesParams::default();
        let mut sim = HawkesSimulator::new(p, ChaCha8Rng::seed_from_u64(8)).unwrap();
        let times: Vec<f64> = (0..200).map(|_| sim.next_event()).collect();
        let direct = hawkes_intensity(&p, times[199] + 1e-9, &EventSequence::new(times.clone()).unwrap());
        assert!((sim.intensity_now() - direct).abs() < 1e-6 * direct);
    }

    #[test]
    fn poisson_special_case() {
        let p = HawkesParams { alpha1: 0.0, alpha2: 0.0, ..Default::default() };
        let mut sim = HawkesSimulator::new(p, ChaCha8Rng::seed_from_u64(13)).unwrap();
        let times: Vec<f64> = (0..10_000).map(|_| sim.next_event()).collect();
        let gaps: Vec<f64> = std::iter::once(times[0]).chain(times.windows(2).map(|w| w[1] - w[0])).collect();
        let (_, pvalue) = ks_test(&gaps, |x| exponential_cdf(x, 0.2));
        assert!(pvalue > 0.01, "p = {pvalue}");
    }

    #[test]
    fn rejects_supercritical() {
        let p = HawkesParams { alpha1: 0.6, ..Default::default() };
        assert!(p.validate().is_err());
        assert!(simulate_hawkes(&p, ChaCha8Rng::seed_from_u64(1), 10.0, 0.0).is_err());
    }

    #[test]
    fn sequence_validation() {
        assert!(EventSequence::new(vec![1.0, 1.0]).is_err());
        assert!(EventSequence::new(vec![1.0, f64::NAN]).is_err());
    }
}
