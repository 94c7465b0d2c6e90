use crate::error::{CrcError, Result};

use super::TppExample;

/// Predicts every next event one median inter-arrival gap after the previous one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MedianPredictor {
    pub median_gap: f64,
}

/// Median of all observed inter-arrival gaps pooled over the training
/// examples (midpoint of the two central gaps for even counts). Depends only
/// on the multiset of gaps, so reordering the examples cannot change it.
pub fn fit_median_predictor(training: &[&TppExample]) -> Result<MedianPredictor> {
    let mut gaps: Vec<f64> = training.iter().flat_map(|e| e.observed.windows(2).map(|w| w[1] - w[0])).collect();
    if gaps.is_empty() {
        return Err(CrcError::Empty("no inter-arrival gaps in the training corpus".into()));
    }
    gaps.sort_by(f64::total_cmp);
    let n = gaps.len();
    let median_gap = if n % 2 == 1 { gaps[n / 2] } else { 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]) };
    Ok(MedianPredictor { median_gap })
}

/// `t̂_{d+j} = t_d + j · median_gap` for `j = 1..=m`, each prediction fed
/// back as the history of the next.
pub fn rollout_predict(pred: &MedianPredictor, observed: &[f64], m: usize) -> Vec<f64> {
    let mut last = *observed.last().expect("nonempty observation");
    (0..m)
        .map(|_| {
            last += pred.median_gap;
            last
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(observed: &[f64]) -> TppExample {
        TppExample { observed: observed.to_vec(), targets: vec![] }
    }

    #[test]
    fn median_rules() {
        let a = ex(&[0.0, 1.0, 3.0, 6.0]);
        assert_eq!(fit_median_predictor(&[&a]).unwrap().median_gap, 2.0);
        let b = ex(&[0.0, 1.0, 4.0]);
        assert_eq!(fit_median_predictor(&[&b]).unwrap().median_gap, 2.0);
        let c = ex(&[10.0, 10.5]);
        assert_eq!(
            fit_median_predictor(&[&a, &b, &c]).unwrap(),
            fit_median_predictor(&[&c, &a, &b]).unwrap()
        );
        assert!(fit_median_predictor(&[]).is_err());
        assert!(fit_median_predictor(&[&ex(&[1.0])]).is_err());
    }

    #[test]
    fn rollout() {
        let p = MedianPredictor { median_gap: 1.0 };
        assert_eq!(rollout_predict(&p, &[9.0, 10.0], 3), vec![11.0, 12.0, 13.0]);
        assert_eq!(rollout_predict(&p, &[10.0], 1), vec![11.0]);
        let p = MedianPredictor { median_gap: 0.3 };
        let out = rollout_predict(&p, &[2.0], 5);
        for (j, t) in out.iter().enumerate() {
            assert!((t - (2.0 + (j + 1) as f64 * 0.3)).abs() < 1e-12);
        }
    }
}
