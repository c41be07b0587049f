use std::fmt;

use rand_distr::{Distribution, StandardNormal};

use super::{check_sigma, SignalPath};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Noise only.
    H0,
    /// Signal plus noise.
    H1,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::H0 => "H0",
            Hypothesis::H1 => "H1",
        })
    }
}

/// Noisy observation vector `y` with the metadata that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationRecord {
    pub samples: Vec<f64>,
    pub sigma: f64,
    pub hypothesis: Hypothesis,
    pub seed: u64,
    /// Present exactly when `hypothesis` is `H1`.
    pub clean_path: Option<SignalPath>,
}

impl ObservationRecord {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Build `y = ζ + w` (H1) or `y = w` (H0) with `w` i.i.d. `N(0, σ²)`.
pub fn add_awgn(
    path: Option<SignalPath>,
    n: usize,
    sigma: f64,
    seed: u64,
    hypothesis: Hypothesis,
) -> Result<ObservationRecord> {
    check_sigma(sigma)?;
    match (&path, hypothesis) {
        (Some(p), Hypothesis::H1) => {
            if p.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: p.len(),
                });
            }
        }
        (None, Hypothesis::H0) => {}
        (Some(_), Hypothesis::H0) => {
            return Err(Error::HypothesisMismatch(
                "a signal path was supplied under H0",
            ))
        }
        (None, Hypothesis::H1) => {
            return Err(Error::HypothesisMismatch("H1 requires a signal path"))
        }
    }
    let mut rng = rng_from_seed(seed);
    let noise = StandardNormal.sample_iter(&mut rng).map(|z: f64| sigma * z);
    let samples = match &path {
        Some(p) => p.values.iter().zip(noise).map(|(s, w)| s + w).collect(),
        None => noise.take(n).collect(),
    };
    Ok(ObservationRecord {
        samples,
        sigma,
        hypothesis,
        seed,
        clean_path: path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal_models::{gen_telegraph, TelegraphModel};

    #[test]
    fn mismatches_are_errors() {
        let m = TelegraphModel::new(1.0, 0.9, 0.9, 8, 1e-3).unwrap();
        let path = gen_telegraph(&m, 1);
        assert!(matches!(
            add_awgn(Some(path.clone()), 8, 1.0, 1, Hypothesis::H0),
            Err(Error::HypothesisMismatch(_))
        ));
        assert!(matches!(
            add_awgn(None, 8, 1.0, 1, Hypothesis::H1),
            Err(Error::HypothesisMismatch(_))
        ));
        assert!(matches!(
            add_awgn(Some(path.clone()), 9, 1.0, 1, Hypothesis::H1),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(add_awgn(Some(path), 8, 0.0, 1, Hypothesis::H1).is_err());
    }

    #[test]
    fn tiny_sigma_reproduces_clean_path() {
        let m = TelegraphModel::new(2.0, 0.9, 0.8, 1000, 1e-3).unwrap();
        let path = gen_telegraph(&m, 4);
        let sigma = 1e-12;
        let obs = add_awgn(Some(path.clone()), 1000, sigma, 5, Hypothesis::H1).unwrap();
        for (y, z) in obs.samples.iter().zip(&path.values) {
            assert!(((y - z) / 2.0).abs() < 10.0 * sigma / 2.0);
        }
        assert_eq!(obs.clean_path.as_ref(), Some(&path));
    }

    #[test]
    fn h0_mean_is_zero() {
        let n = 100_000;
        let sigma = 3.0;
        for seed in 0..5 {
            let obs = add_awgn(None, n, sigma, seed, Hypothesis::H0).unwrap();
            assert_eq!(obs.len(), n);
            assert!(obs.clean_path.is_none());
            let mean = obs.samples.iter().sum::<f64>() / n as f64;
            assert!(mean.abs() < 4.0 * sigma / (n as f64).sqrt());
            let var = obs.samples.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n as f64;
            assert!((var / (sigma * sigma) - 1.0).abs() < 0.03);
        }
    }

    #[test]
    fn reproducible() {
        let a = add_awgn(None, 50, 1.0, 77, Hypothesis::H0).unwrap();
        let b = add_awgn(None, 50, 1.0, 77, Hypothesis::H0).unwrap();
        assert_eq!(a, b);
    }
}
