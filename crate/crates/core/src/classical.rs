//! Amplitude, energy, filtered-energy and omniscient matched-filter
//! statistics.

use crate::error::{invalid, Error, Result};
use crate::signal_models::SignalPath;
use crate::statistic::Statistic;

/// First-order low-pass filter `H(z) = ((1−α)/2)·(1 + z⁻¹)/(1 − α z⁻¹)`.
///
/// Unit DC gain for every `|α| < 1`. Runs from zero initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowPassFilter {
    alpha: f64,
}

impl LowPassFilter {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha.abs() < 1.0) {
            return Err(invalid(
                "alpha",
                format!("filter requires |α| < 1, got {alpha}"),
            ));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// First `len` taps: `h_0 = (1−α)/2`, `h_k = ((1−α²)/2)·α^{k−1}`.
    pub fn impulse_response(&self, len: usize) -> Vec<f64> {
        let mut impulse = vec![0.0; len];
        if let Some(first) = impulse.first_mut() {
            *first = 1.0;
        }
        self.apply(&impulse)
    }

    /// Causal output `a_i = α·a_{i−1} + ((1−α)/2)·(y_i + y_{i−1})`.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(y.len());
        self.run(y, |a| out.push(a));
        out
    }

    /// `Σ a_i²` without materializing the filtered sequence.
    pub fn output_energy(&self, y: &[f64]) -> f64 {
        let mut energy = 0.0;
        self.run(y, |a| energy += a * a);
        energy
    }

    #[inline]
    fn run(&self, y: &[f64], mut sink: impl FnMut(f64)) {
        let gain = 0.5 * (1.0 - self.alpha);
        let mut prev_in = 0.0;
        let mut prev_out = 0.0;
        for &x in y {
            let a = self.alpha * prev_out + gain * (x + prev_in);
            sink(a);
            prev_in = x;
            prev_out = a;
        }
    }
}

/// `|(1/N)·Σ y_i|`.
pub fn amplitude_statistic(y: &[f64]) -> Result<Statistic> {
    if y.is_empty() {
        return Err(Error::EmptyInput("amplitude statistic"));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    Ok(Statistic::new("amplitude", mean.abs()))
}

pub fn lpf_apply(filter: &LowPassFilter, y: &[f64]) -> Vec<f64> {
    filter.apply(y)
}

/// `Σ a_i²` with `a = y` (no filter) or `a` the low-pass output.
pub fn energy_statistic(y: &[f64], filter: Option<&LowPassFilter>) -> Result<Statistic> {
    if y.is_empty() {
        return Err(Error::EmptyInput("energy statistic"));
    }
    Ok(match filter {
        None => Statistic::new("energy", y.iter().map(|v| v * v).sum()),
        Some(f) => Statistic::new("filtered-energy", f.output_energy(y)),
    })
}

/// Correlator `Σ ζ_i·y_i` against the true (signed) signal realization.
pub fn matched_filter_statistic(y: &[f64], clean: &SignalPath) -> Result<Statistic> {
    if y.len() != clean.len() {
        return Err(Error::LengthMismatch {
            expected: clean.len(),
            actual: y.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::EmptyInput("matched filter"));
    }
    Ok(Statistic::new(
        "mf",
        y.iter().zip(&clean.values).map(|(a, b)| a * b).sum(),
    ))
}
