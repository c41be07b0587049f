use std::fmt;
use std::str::FromStr;

use crate::approx::{hybrid_constants, hybrid_statistic, HybridConstants};
use crate::classical::{
    amplitude_statistic, energy_statistic, matched_filter_statistic, LowPassFilter,
};
use crate::error::{invalid, Error, Result};
use crate::lrt::{TelegraphLrt, WalkLrt};
use crate::rng::{substream_seed, Stream};
use crate::signal_models::{fit_telegraph_alpha_to_walk, fit_walk_paths, SignalModel, SignalPath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorKind {
    MatchedFilter,
    RtLrt,
    RwLrt,
    FilteredEnergy,
    Hybrid,
    Amplitude,
    Energy,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 7] = [
        DetectorKind::MatchedFilter,
        DetectorKind::RtLrt,
        DetectorKind::RwLrt,
        DetectorKind::FilteredEnergy,
        DetectorKind::Hybrid,
        DetectorKind::Amplitude,
        DetectorKind::Energy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::MatchedFilter => "mf",
            DetectorKind::RtLrt => "rt-lrt",
            DetectorKind::RwLrt => "rw-lrt",
            DetectorKind::FilteredEnergy => "filtered-energy",
            DetectorKind::Hybrid => "hybrid",
            DetectorKind::Amplitude => "amplitude",
            DetectorKind::Energy => "energy",
        }
    }

    /// Detectors built from the telegraph surrogate of the signal model.
    fn uses_surrogate(self) -> bool {
        matches!(
            self,
            DetectorKind::RtLrt | DetectorKind::FilteredEnergy | DetectorKind::Hybrid
        )
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DetectorKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| invalid("detector", format!("unknown detector `{s}`")))
    }
}

/// Detector names plus their shared tuning.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSet {
    pub kinds: Vec<DetectorKind>,
    /// LPF pole; `None` derives it from the model.
    pub alpha: Option<f64>,
    /// Walk realizations used to fit the telegraph surrogate.
    pub fit_paths: usize,
}

impl DetectorSet {
    pub fn new(kinds: Vec<DetectorKind>) -> Self {
        Self {
            kinds,
            alpha: None,
            fit_paths: 200,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_fit_paths(mut self, fit_paths: usize) -> Self {
        self.fit_paths = fit_paths;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::EmptyInput("detector set"));
        }
        for (i, k) in self.kinds.iter().enumerate() {
            if self.kinds[..i].contains(k) {
                return Err(invalid("detectors", format!("`{k}` listed twice")));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(invalid("alpha", format!("must lie in (0, 1), got {a}")));
            }
        }
        Ok(())
    }
}

/// Symmetric or asymmetric telegraph standing in for the signal model in
/// the RT-LRT, filtered-energy and hybrid detectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelegraphSurrogate {
    pub amplitude: f64,
    pub p: f64,
    pub q: f64,
    pub alpha: Option<f64>,
}

/// Telegraph models map to themselves with `α = p + q − 1`. Walks are fitted
/// from simulated paths with `p̂ = q̂`, amplitude `√E[ζ²]` and `α = 2p̂ − 1`.
pub fn telegraph_surrogate(
    model: &SignalModel,
    set: &DetectorSet,
    master_seed: u64,
) -> Result<TelegraphSurrogate> {
    let mut surrogate = match model {
        SignalModel::Telegraph(m) => {
            let r = m.r();
            TelegraphSurrogate {
                amplitude: m.amplitude(),
                p: m.p(),
                q: m.q(),
                alpha: (r > 0.0 && r < 1.0).then_some(r),
            }
        }
        SignalModel::Walk(m) => {
            let seed = substream_seed(master_seed, u64::MAX, Stream::Calibration);
            let fit = if m.is_symmetric() {
                fit_telegraph_alpha_to_walk(m, set.fit_paths, seed)?
            } else {
                fit_walk_paths(m, set.fit_paths, seed)?
            };
            TelegraphSurrogate {
                amplitude: m.stationary_power()?.sqrt(),
                p: fit.p,
                q: fit.p,
                alpha: (fit.alpha > 0.0 && fit.alpha < 1.0).then_some(fit.alpha),
            }
        }
    };
    if set.alpha.is_some() {
        surrogate.alpha = set.alpha;
    }
    Ok(surrogate)
}

fn surrogate_alpha(s: &TelegraphSurrogate) -> Result<f64> {
    s.alpha.ok_or_else(|| {
        invalid(
            "alpha",
            "cannot be derived from the model (p + q − 1 outside (0, 1)); set it explicitly",
        )
    })
}

#[derive(Debug, Clone)]
enum Resolved {
    MatchedFilter,
    RtLrt(TelegraphLrt),
    RwLrt(Box<WalkLrt>),
    FilteredEnergy(LowPassFilter),
    Hybrid(HybridConstants),
    Amplitude,
    Energy,
}

/// Detectors with every per-`σ` constant precomputed.
#[derive(Debug, Clone)]
pub struct DetectorBank {
    kinds: Vec<DetectorKind>,
    resolved: Vec<Resolved>,
}

impl DetectorBank {
    pub fn new(
        model: &SignalModel,
        sigma: f64,
        kinds: &[DetectorKind],
        surrogate: Option<&TelegraphSurrogate>,
    ) -> Result<Self> {
        let resolved = kinds
            .iter()
            .map(|&k| {
                let sur = || {
                    surrogate.ok_or_else(|| {
                        invalid("detectors", format!("`{k}` needs a telegraph surrogate"))
                    })
                };
                Ok(match k {
                    DetectorKind::MatchedFilter => Resolved::MatchedFilter,
                    DetectorKind::RtLrt => {
                        let s = sur()?;
                        Resolved::RtLrt(TelegraphLrt::new(s.amplitude, sigma, s.p, s.q)?)
                    }
                    DetectorKind::RwLrt => match model {
                        SignalModel::Walk(m) => Resolved::RwLrt(Box::new(WalkLrt::new(m, sigma)?)),
                        SignalModel::Telegraph(_) => {
                            return Err(invalid("detectors", "rw-lrt requires a walk model"))
                        }
                    },
                    DetectorKind::FilteredEnergy => {
                        Resolved::FilteredEnergy(LowPassFilter::new(surrogate_alpha(sur()?)?)?)
                    }
                    DetectorKind::Hybrid => {
                        let s = sur()?;
                        Resolved::Hybrid(hybrid_constants(
                            s.p,
                            s.q,
                            s.amplitude,
                            sigma,
                            surrogate_alpha(s)?,
                        )?)
                    }
                    DetectorKind::Amplitude => Resolved::Amplitude,
                    DetectorKind::Energy => Resolved::Energy,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kinds: kinds.to_vec(),
            resolved,
        })
    }

    pub fn kinds(&self) -> &[DetectorKind] {
        &self.kinds
    }

    /// Every statistic on `y`; `template` is the signal path the matched
    /// filter correlates against.
    pub fn evaluate(&self, y: &[f64], template: Option<&SignalPath>) -> Result<Vec<f64>> {
        self.resolved
            .iter()
            .map(|d| {
                Ok(match d {
                    Resolved::MatchedFilter => {
                        let t = template.ok_or(Error::HypothesisMismatch(
                            "the matched filter needs the clean signal path",
                        ))?;
                        matched_filter_statistic(y, t)?.value
                    }
                    Resolved::RtLrt(lrt) => lrt.log_lrt(y)?,
                    Resolved::RwLrt(lrt) => lrt.log_lrt(y)?,
                    Resolved::FilteredEnergy(f) => energy_statistic(y, Some(f))?.value,
                    Resolved::Hybrid(c) => hybrid_statistic(y, c, c.alpha)?.value,
                    Resolved::Amplitude => amplitude_statistic(y)?.value,
                    Resolved::Energy => energy_statistic(y, None)?.value,
                })
            })
            .collect()
    }
}

/// Whether any of `kinds` is built from [`telegraph_surrogate`].
pub fn needs_surrogate(kinds: &[DetectorKind]) -> bool {
    kinds.iter().any(|k| k.uses_surrogate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal_models::{TelegraphModel, WalkModel};

    #[test]
    fn names_round_trip() {
        for k in DetectorKind::ALL {
            assert_eq!(k.name().parse::<DetectorKind>().unwrap(), k);
        }
        assert!("lrt".parse::<DetectorKind>().is_err());
    }

    #[test]
    fn telegraph_surrogate_is_the_model() {
        let m: SignalModel = TelegraphModel::new(2.0, 0.9998, 0.9992, 100, 1e-3)
            .unwrap()
            .into();
        let s = telegraph_surrogate(&m, &DetectorSet::new(vec![DetectorKind::Hybrid]), 1).unwrap();
        assert_eq!((s.amplitude, s.p, s.q), (2.0, 0.9998, 0.9992));
        assert!((s.alpha.unwrap() - 0.999).abs() < 1e-12);
        let set = DetectorSet::new(vec![DetectorKind::Hybrid]).with_alpha(0.9);
        assert_eq!(telegraph_surrogate(&m, &set, 1).unwrap().alpha, Some(0.9));
    }

    #[test]
    fn walk_surrogate_uses_rms_amplitude() {
        let w = WalkModel::symmetric(4, 0.25, 0.5, 2000).unwrap();
        let power = w.stationary_power().unwrap();
        let m: SignalModel = w.into();
        let set = DetectorSet::new(vec![DetectorKind::RtLrt]).with_fit_paths(20);
        let s = telegraph_surrogate(&m, &set, 3).unwrap();
        assert!((s.amplitude - power.sqrt()).abs() < 1e-12);
        assert_eq!(s.p, s.q);
        assert!((s.alpha.unwrap() - (2.0 * s.p - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn bank_rejects_bad_combinations() {
        let m: SignalModel = TelegraphModel::new(1.0, 0.9, 0.9, 10, 1e-3).unwrap().into();
        assert!(DetectorBank::new(&m, 1.0, &[DetectorKind::RwLrt], None).is_err());
        assert!(DetectorBank::new(&m, 1.0, &[DetectorKind::RtLrt], None).is_err());
        let bank = DetectorBank::new(&m, 1.0, &[DetectorKind::MatchedFilter], None).unwrap();
        assert!(bank.evaluate(&[0.0; 10], None).is_err());

        let half: SignalModel = TelegraphModel::new(1.0, 0.5, 0.5, 10, 1e-3).unwrap().into();
        let set = DetectorSet::new(vec![DetectorKind::FilteredEnergy]);
        let s = telegraph_surrogate(&half, &set, 0).unwrap();
        assert!(DetectorBank::new(&half, 1.0, &set.kinds, Some(&s)).is_err());
    }

    #[test]
    fn set_validation() {
        assert!(DetectorSet::new(vec![]).validate().is_err());
        assert!(
            DetectorSet::new(vec![DetectorKind::Energy, DetectorKind::Energy])
                .validate()
                .is_err()
        );
        assert!(DetectorSet::new(vec![DetectorKind::Energy])
            .with_alpha(1.0)
            .validate()
            .is_err());
    }
}
