use rand::Rng;

use super::{check_probability, ModelTag, SignalPath};
use crate::error::{invalid, Result};
use crate::rng::{rng_from_seed, SimRng};

/// Two-state Markov signal taking values `±A`.
///
/// From `+A` the chain stays with probability `p`; from `−A` it stays with
/// probability `q`. The initial state is `±A` with probability ½ each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelegraphModel {
    amplitude: f64,
    p: f64,
    q: f64,
    n_samples: usize,
    sample_period: f64,
}

impl TelegraphModel {
    pub fn new(
        amplitude: f64,
        p: f64,
        q: f64,
        n_samples: usize,
        sample_period: f64,
    ) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(invalid(
                "amplitude",
                format!("must be finite and > 0, got {amplitude}"),
            ));
        }
        check_probability("p", p)?;
        check_probability("q", q)?;
        if n_samples == 0 {
            return Err(invalid("n_samples", "must be at least 1"));
        }
        if !(sample_period.is_finite() && sample_period > 0.0) {
            return Err(invalid(
                "sample_period",
                format!("must be > 0, got {sample_period}"),
            ));
        }
        Ok(Self {
            amplitude,
            p,
            q,
            n_samples,
            sample_period,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn is_symmetric(&self) -> bool {
        self.p == self.q
    }

    /// Second eigenvalue `r = p + q − 1` of the transition matrix.
    pub fn r(&self) -> f64 {
        self.p + self.q - 1.0
    }

    /// Asymmetry coefficient `C_m = (p − q)/(2 − p − q)`.
    pub fn c_m(&self) -> f64 {
        (self.p - self.q) / (2.0 - self.p - self.q)
    }

    /// `lim E[ζ_i] = A·C_m`.
    pub fn stationary_mean(&self) -> f64 {
        self.amplitude * self.c_m()
    }

    pub fn with_n_samples(mut self, n_samples: usize) -> Result<Self> {
        if n_samples == 0 {
            return Err(invalid("n_samples", "must be at least 1"));
        }
        self.n_samples = n_samples;
        Ok(self)
    }

    pub fn generate_with(&self, rng: &mut SimRng) -> SignalPath {
        let a = self.amplitude;
        let mut values = Vec::with_capacity(self.n_samples);
        let mut up = rng.random::<bool>();
        values.push(if up { a } else { -a });
        for _ in 1..self.n_samples {
            let stay = if up { self.p } else { self.q };
            if rng.random::<f64>() >= stay {
                up = !up;
            }
            values.push(if up { a } else { -a });
        }
        SignalPath {
            values,
            model: ModelTag::Telegraph,
        }
    }
}

/// Draw one telegraph path; identical `(model, seed)` give identical paths.
pub fn gen_telegraph(model: &TelegraphModel, seed: u64) -> SignalPath {
    model.generate_with(&mut rng_from_seed(seed))
}
