use rayon::prelude::*;

use super::detectors::{
    needs_surrogate, telegraph_surrogate, DetectorBank, DetectorSet, TelegraphSurrogate,
};
use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, substream_seed, Stream};
use crate::signal_models::{add_awgn, check_sigma, Hypothesis, SignalModel};

/// Identifies the run a batch came from; batches compared as a pair must
/// carry equal fingerprints.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    pub model: String,
    pub n_samples: usize,
    pub sigma: f64,
    pub n_trials: usize,
    pub master_seed: u64,
}

impl Fingerprint {
    pub fn new(model: &SignalModel, sigma: f64, n_trials: usize, master_seed: u64) -> Self {
        Self {
            model: format!("{model:?}"),
            n_samples: model.n_samples(),
            sigma,
            n_trials,
            master_seed,
        }
    }
}

/// One detector's statistics over all trials, indexed by trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialBatch {
    pub detector: String,
    pub h0_stats: Vec<f64>,
    pub h1_stats: Vec<f64>,
    pub fingerprint: Fingerprint,
}

impl TrialBatch {
    pub fn new(
        detector: impl Into<String>,
        h0_stats: Vec<f64>,
        h1_stats: Vec<f64>,
        fingerprint: Fingerprint,
    ) -> Result<Self> {
        if h0_stats.len() != h1_stats.len() {
            return Err(Error::LengthMismatch {
                expected: h0_stats.len(),
                actual: h1_stats.len(),
            });
        }
        if h0_stats.is_empty() {
            return Err(Error::EmptyInput("trial batch"));
        }
        if h0_stats.iter().chain(&h1_stats).any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite detector statistic".into()));
        }
        Ok(Self {
            detector: detector.into(),
            h0_stats,
            h1_stats,
            fingerprint,
        })
    }

    pub fn n_trials(&self) -> usize {
        self.h0_stats.len()
    }
}

/// Simulate `n_trials` paired H0/H1 observations and evaluate every detector
/// in `set` on each. Trial `t` draws its signal path and both noise vectors
/// from substreams keyed on `(master_seed, t)`; under H0 the matched filter
/// correlates against that trial's signal path.
pub fn run_trials(
    model: &SignalModel,
    set: &DetectorSet,
    n_trials: usize,
    sigma: f64,
    master_seed: u64,
) -> Result<Vec<TrialBatch>> {
    set.validate()?;
    let surrogate = if needs_surrogate(&set.kinds) {
        Some(telegraph_surrogate(model, set, master_seed)?)
    } else {
        None
    };
    run_with_surrogate(model, set, surrogate.as_ref(), n_trials, sigma, master_seed)
}

pub(crate) fn run_with_surrogate(
    model: &SignalModel,
    set: &DetectorSet,
    surrogate: Option<&TelegraphSurrogate>,
    n_trials: usize,
    sigma: f64,
    master_seed: u64,
) -> Result<Vec<TrialBatch>> {
    if n_trials < 2 {
        return Err(invalid(
            "n_trials",
            format!("must be at least 2, got {n_trials}"),
        ));
    }
    check_sigma(sigma)?;
    let bank = DetectorBank::new(model, sigma, &set.kinds, surrogate)?;
    let n = model.n_samples();
    let per_trial = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let signal = model.generate_with(&mut rng_from_seed(substream_seed(
                master_seed,
                t,
                Stream::Signal,
            )));
            let h0 = add_awgn(
                None,
                n,
                sigma,
                substream_seed(master_seed, t, Stream::NoiseH0),
                Hypothesis::H0,
            )?;
            let s0 = bank.evaluate(&h0.samples, Some(&signal))?;
            drop(h0);
            let h1 = add_awgn(
                Some(signal),
                n,
                sigma,
                substream_seed(master_seed, t, Stream::NoiseH1),
                Hypothesis::H1,
            )?;
            let s1 = bank.evaluate(&h1.samples, h1.clean_path.as_ref())?;
            Ok((s0, s1))
        })
        .collect::<Result<Vec<_>>>()?;

    let fingerprint = Fingerprint::new(model, sigma, n_trials, master_seed);
    bank.kinds()
        .iter()
        .enumerate()
        .map(|(d, kind)| {
            TrialBatch::new(
                kind.name(),
                per_trial.iter().map(|(s0, _)| s0[d]).collect(),
                per_trial.iter().map(|(_, s1)| s1[d]).collect(),
                fingerprint.clone(),
            )
            .map_err(|e| match e {
                Error::Numerical(msg) => Error::Numerical(format!("{kind}: {msg}")),
                other => other,
            })
        })
        .collect()
}
