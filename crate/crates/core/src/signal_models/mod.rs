//! Clean signal generators for the two-state telegraph and reflecting
//! random-walk models, additive white Gaussian noise, and the parameter
//! calibration helpers used to configure detectors.

mod calibration;
mod noise;
mod telegraph;
mod walk;

pub use calibration::{
    alpha_from_bandwidth, empirical_autocorrelation, fit_telegraph_alpha_to_walk, fit_telegraph_p,
    fit_walk_paths, physical_amplitude, telegraph_p_from_rate, TelegraphFit,
};
pub use noise::{add_awgn, Hypothesis, ObservationRecord};
pub use telegraph::{gen_telegraph, TelegraphModel};
pub use walk::{gen_random_walk, stationary_distribution, WalkModel};

use crate::error::{invalid, Result};
use crate::rng::{rng_from_seed, SimRng};

/// Which generator produced a [`SignalPath`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    Telegraph,
    Walk,
}

impl ModelTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Telegraph => "telegraph",
            ModelTag::Walk => "walk",
        }
    }
}

/// A noise-free realization of the spin signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalPath {
    pub values: Vec<f64>,
    pub model: ModelTag,
}

impl SignalPath {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Either signal model, so the harness and CLI can treat them uniformly.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalModel {
    Telegraph(TelegraphModel),
    Walk(WalkModel),
}

impl SignalModel {
    pub fn tag(&self) -> ModelTag {
        match self {
            SignalModel::Telegraph(_) => ModelTag::Telegraph,
            SignalModel::Walk(_) => ModelTag::Walk,
        }
    }

    pub fn n_samples(&self) -> usize {
        match self {
            SignalModel::Telegraph(m) => m.n_samples(),
            SignalModel::Walk(m) => m.n_samples(),
        }
    }

    pub fn generate(&self, seed: u64) -> SignalPath {
        self.generate_with(&mut rng_from_seed(seed))
    }

    pub fn generate_with(&self, rng: &mut SimRng) -> SignalPath {
        match self {
            SignalModel::Telegraph(m) => m.generate_with(rng),
            SignalModel::Walk(m) => m.generate_with(rng),
        }
    }

    /// Steady-state `E[ζ²]`.
    pub fn stationary_power(&self) -> Result<f64> {
        match self {
            SignalModel::Telegraph(m) => Ok(m.amplitude() * m.amplitude()),
            SignalModel::Walk(m) => m.stationary_power(),
        }
    }

    /// Steady-state `E[ζ]`.
    pub fn stationary_mean(&self) -> Result<f64> {
        match self {
            SignalModel::Telegraph(m) => Ok(m.stationary_mean()),
            SignalModel::Walk(m) => m.stationary_mean(),
        }
    }

    /// `SNR_dB = 10·log10(E[ζ²]/σ²)` with the steady-state signal power.
    pub fn snr_db(&self, sigma: f64) -> Result<f64> {
        check_sigma(sigma)?;
        Ok(10.0 * (self.stationary_power()? / (sigma * sigma)).log10())
    }

    /// Noise standard deviation giving the requested SNR.
    pub fn sigma_for_snr_db(&self, snr_db: f64) -> Result<f64> {
        if !snr_db.is_finite() {
            return Err(invalid("snr_db", "must be finite"));
        }
        Ok((self.stationary_power()? / 10f64.powf(snr_db / 10.0)).sqrt())
    }
}

impl From<TelegraphModel> for SignalModel {
    fn from(m: TelegraphModel) -> Self {
        SignalModel::Telegraph(m)
    }
}

impl From<WalkModel> for SignalModel {
    fn from(m: WalkModel) -> Self {
        SignalModel::Walk(m)
    }
}

/// SNR in dB of `model` observed in noise of standard deviation `sigma`.
pub fn snr_db(model: &SignalModel, sigma: f64) -> Result<f64> {
    model.snr_db(sigma)
}

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(invalid(
            "sigma",
            format!("must be finite and > 0, got {sigma}"),
        ))
    }
}

pub(crate) fn check_probability(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must lie in (0, 1), got {v}")))
    }
}
