//! Flat `section.key = value` experiment configuration.
//!
//! Sections: `model`, `noise`, `run`, `detectors`. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::harness::{DetectorKind, DetectorSet};
use crate::signal_models::{telegraph_p_from_rate, SignalModel, TelegraphModel, WalkModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("key `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("conflicting keys: {0}")]
    Conflict(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
}

type CResult<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TelegraphTransitions {
    Probabilities {
        p: f64,
        q: f64,
    },
    /// Symmetric `p = q = 1 − T_s·λ`.
    Rate {
        lambda: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkScale {
    Step(f64),
    /// Half-width `M·s` of the state range.
    Amplitude(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    Telegraph {
        amplitude: f64,
        transitions: TelegraphTransitions,
    },
    Walk {
        half_states: usize,
        scale: WalkScale,
        k1: f64,
        k2: f64,
        h1: f64,
        h2: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseConfig {
    SnrDb(f64),
    Sigma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RecordLength {
    Samples(usize),
    /// Seconds; `N = round(T/T_s)`.
    Duration(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub length: RecordLength,
    pub sample_period: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub pf: f64,
    pub snr_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorsConfig {
    pub list: Vec<DetectorKind>,
    /// `None` is written as `auto`.
    pub alpha: Option<f64>,
    pub fit_paths: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    /// Required by everything except power sweeps, which take their noise
    /// levels from `run.snr_grid`.
    pub noise: Option<NoiseConfig>,
    pub run: RunConfig,
    pub detectors: DetectorsConfig,
}

pub const DEFAULT_TRIALS: usize = 2000;
pub const DEFAULT_PF: f64 = 0.1;
pub const DEFAULT_FIT_PATHS: usize = 200;

struct Entries {
    map: BTreeMap<String, String>,
}

impl Entries {
    fn parse(text: &str) -> CResult<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                reason: "expected `section.key = value`".into(),
            })?;
            let key = key.trim();
            if !key.contains('.') {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    reason: format!("key `{key}` has no section"),
                });
            }
            if map
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(ConfigError::DuplicateKey(key.to_string()));
            }
        }
        Ok(Self { map })
    }

    fn has_section(&self, section: &str) -> bool {
        let prefix = format!("{section}.");
        self.map.keys().any(|k| k.starts_with(&prefix))
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn require(&mut self, key: &str) -> CResult<String> {
        self.take(key)
            .ok_or_else(|| ConfigError::MissingKey(key.to_string()))
    }

    fn take_parsed<T: FromStr>(&mut self, key: &str) -> CResult<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.take(key).map(|v| parse_value(key, &v)).transpose()
    }

    fn require_parsed<T: FromStr>(&mut self, key: &str) -> CResult<T>
    where
        T::Err: fmt::Display,
    {
        let v = self.require(key)?;
        parse_value(key, &v)
    }

    fn finish(self) -> CResult<()> {
        match self.map.into_keys().next() {
            Some(k) => Err(ConfigError::UnknownKey(k)),
            None => Ok(()),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> CResult<T>
where
    T::Err: fmt::Display,
{
    v.parse().map_err(|e: T::Err| ConfigError::BadValue {
        key: key.to_string(),
        reason: format!("`{v}`: {e}"),
    })
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> CResult<Vec<T>>
where
    T::Err: fmt::Display,
{
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn exclusive<T>(a: (&str, Option<T>), b: (&str, Option<T>)) -> CResult<Option<Result<T, T>>> {
    match (a.1, b.1) {
        (Some(_), Some(_)) => Err(ConfigError::Conflict(format!(
            "set only one of `{}` and `{}`",
            a.0, b.0
        ))),
        (Some(x), None) => Ok(Some(Ok(x))),
        (None, Some(y)) => Ok(Some(Err(y))),
        (None, None) => Ok(None),
    }
}

fn default_detectors(model: &ModelConfig) -> Vec<DetectorKind> {
    DetectorKind::ALL
        .into_iter()
        .filter(|k| *k != DetectorKind::RwLrt || matches!(model, ModelConfig::Walk { .. }))
        .collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CResult<Self> {
        let mut e = Entries::parse(text)?;
        for section in ["model", "run"] {
            if !e.has_section(section) {
                return Err(ConfigError::MissingSection(section));
            }
        }

        let kind = e.require("model.type")?;
        let model = match kind.as_str() {
            "telegraph" => {
                let amplitude = e.require_parsed("model.amplitude")?;
                let p: Option<f64> = e.take_parsed("model.p")?;
                let q: Option<f64> = e.take_parsed("model.q")?;
                let lambda: Option<f64> = e.take_parsed("model.lambda")?;
                let transitions = match (p, q, lambda) {
                    (Some(p), Some(q), None) => TelegraphTransitions::Probabilities { p, q },
                    (None, None, Some(lambda)) => TelegraphTransitions::Rate { lambda },
                    (None, None, None) => {
                        return Err(ConfigError::MissingKey(
                            "model.p/model.q or model.lambda".into(),
                        ))
                    }
                    _ => {
                        return Err(ConfigError::Conflict(
                            "give both `model.p` and `model.q`, or only `model.lambda`".into(),
                        ))
                    }
                };
                ModelConfig::Telegraph {
                    amplitude,
                    transitions,
                }
            }
            "walk" => {
                let half_states = e.require_parsed("model.m")?;
                let scale = match exclusive(
                    ("model.step", e.take_parsed("model.step")?),
                    ("model.amplitude", e.take_parsed("model.amplitude")?),
                )? {
                    Some(Ok(s)) => WalkScale::Step(s),
                    Some(Err(a)) => WalkScale::Amplitude(a),
                    None => {
                        return Err(ConfigError::MissingKey(
                            "model.step or model.amplitude".into(),
                        ))
                    }
                };
                let k1: f64 = e.require_parsed("model.k1")?;
                let h1: f64 = e.require_parsed("model.h1")?;
                let k2 = e.take_parsed("model.k2")?.unwrap_or(1.0 - k1);
                let h2 = e.take_parsed("model.h2")?.unwrap_or(1.0 - h1);
                ModelConfig::Walk {
                    half_states,
                    scale,
                    k1,
                    k2,
                    h1,
                    h2,
                }
            }
            other => {
                return Err(ConfigError::BadValue {
                    key: "model.type".into(),
                    reason: format!("`{other}` is not `telegraph` or `walk`"),
                })
            }
        };

        let noise = exclusive(
            ("noise.snr_db", e.take_parsed("noise.snr_db")?),
            ("noise.sigma", e.take_parsed("noise.sigma")?),
        )?
        .map(|v| match v {
            Ok(db) => NoiseConfig::SnrDb(db),
            Err(s) => NoiseConfig::Sigma(s),
        });

        let length = match exclusive(
            (
                "run.n",
                e.take_parsed::<usize>("run.n")?.map(RecordLength::Samples),
            ),
            (
                "run.duration",
                e.take_parsed::<f64>("run.duration")?
                    .map(RecordLength::Duration),
            ),
        )? {
            Some(Ok(l) | Err(l)) => l,
            None => return Err(ConfigError::MissingKey("run.n or run.duration".into())),
        };
        let snr_grid = match e.take("run.snr_grid") {
            Some(v) => parse_list("run.snr_grid", &v)?,
            None => Vec::new(),
        };
        let run = RunConfig {
            length,
            sample_period: e.take_parsed("run.ts")?,
            trials: e.take_parsed("run.trials")?.unwrap_or(DEFAULT_TRIALS),
            seed: e.take_parsed("run.seed")?.unwrap_or(0),
            pf: e.take_parsed("run.pf")?.unwrap_or(DEFAULT_PF),
            snr_grid,
        };

        let list = match e.take("detectors.list") {
            Some(v) => parse_list("detectors.list", &v)?,
            None => default_detectors(&model),
        };
        let alpha = match e.take("detectors.alpha") {
            None => None,
            Some(v) if v == "auto" => None,
            Some(v) => Some(parse_value("detectors.alpha", &v)?),
        };
        let detectors = DetectorsConfig {
            list,
            alpha,
            fit_paths: e
                .take_parsed("detectors.fit_paths")?
                .unwrap_or(DEFAULT_FIT_PATHS),
        };
        e.finish()?;

        let config = Self {
            model,
            noise,
            run,
            detectors,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> CResult<()> {
        let model = self.signal_model()?;
        if let Some(noise) = self.noise {
            self.sigma_with(&model, noise)?;
        }
        if !(self.run.pf > 0.0 && self.run.pf < 1.0) {
            return Err(ConfigError::BadValue {
                key: "run.pf".into(),
                reason: "must lie in (0, 1)".into(),
            });
        }
        if self.run.snr_grid.windows(2).any(|w| w[1] <= w[0])
            || self.run.snr_grid.iter().any(|v| !v.is_finite())
        {
            return Err(ConfigError::BadValue {
                key: "run.snr_grid".into(),
                reason: "must be finite and strictly increasing".into(),
            });
        }
        self.detector_set().validate()?;
        Ok(())
    }

    pub fn n_samples(&self) -> CResult<usize> {
        match self.run.length {
            RecordLength::Samples(n) => Ok(n),
            RecordLength::Duration(t) => {
                let ts = self
                    .run
                    .sample_period
                    .ok_or_else(|| ConfigError::MissingKey("run.ts".into()))?;
                let n = (t / ts).round();
                if !(n >= 1.0 && n.is_finite()) {
                    return Err(ConfigError::BadValue {
                        key: "run.duration".into(),
                        reason: format!("T/T_s = {n} is not a usable sample count"),
                    });
                }
                Ok(n as usize)
            }
        }
    }

    /// `(p, q)` of a telegraph model.
    pub fn telegraph_probabilities(&self) -> CResult<Option<(f64, f64)>> {
        match &self.model {
            ModelConfig::Telegraph { transitions, .. } => Ok(Some(match *transitions {
                TelegraphTransitions::Probabilities { p, q } => (p, q),
                TelegraphTransitions::Rate { lambda } => {
                    let ts = self
                        .run
                        .sample_period
                        .ok_or_else(|| ConfigError::MissingKey("run.ts".into()))?;
                    let p = telegraph_p_from_rate(lambda, ts)?;
                    (p, p)
                }
            })),
            ModelConfig::Walk { .. } => Ok(None),
        }
    }

    pub fn signal_model(&self) -> CResult<SignalModel> {
        let n = self.n_samples()?;
        let ts = self.run.sample_period.unwrap_or(1e-3);
        Ok(match &self.model {
            ModelConfig::Telegraph { amplitude, .. } => {
                let (p, q) = self.telegraph_probabilities()?.expect("telegraph");
                TelegraphModel::new(*amplitude, p, q, n, ts)?.into()
            }
            &ModelConfig::Walk {
                half_states,
                scale,
                k1,
                k2,
                h1,
                h2,
            } => {
                let step = match scale {
                    WalkScale::Step(s) => s,
                    WalkScale::Amplitude(a) => a / half_states.max(1) as f64,
                };
                WalkModel::new(half_states, step, k1, k2, h1, h2, n)?.into()
            }
        })
    }

    fn sigma_with(&self, model: &SignalModel, noise: NoiseConfig) -> CResult<f64> {
        let sigma = match noise {
            NoiseConfig::Sigma(s) => s,
            NoiseConfig::SnrDb(db) => model.sigma_for_snr_db(db)?,
        };
        crate::signal_models::check_sigma(sigma)?;
        Ok(sigma)
    }

    /// Noise standard deviation from the `noise` section.
    pub fn sigma(&self) -> CResult<f64> {
        let noise = self.noise.ok_or(ConfigError::MissingSection("noise"))?;
        self.sigma_with(&self.signal_model()?, noise)
    }

    pub fn detector_set(&self) -> DetectorSet {
        DetectorSet {
            kinds: self.detectors.list.clone(),
            alpha: self.detectors.alpha,
            fit_paths: self.detectors.fit_paths,
        }
    }

    /// `key=value` pairs describing the experiment, for CSV headers.
    pub fn metadata(&self) -> CResult<Vec<(String, String)>> {
        let mut out = Vec::new();
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        match &self.model {
            ModelConfig::Telegraph { amplitude, .. } => {
                let (p, q) = self.telegraph_probabilities()?.expect("telegraph");
                push("model", "telegraph".into());
                push("amplitude", amplitude.to_string());
                push("p", fmt_prob(p));
                push("q", fmt_prob(q));
            }
            ModelConfig::Walk {
                half_states,
                k1,
                k2,
                h1,
                h2,
                ..
            } => {
                let SignalModel::Walk(w) = self.signal_model()? else {
                    unreachable!()
                };
                push("model", "walk".into());
                push("m", half_states.to_string());
                push("step", w.step().to_string());
                push("k1", k1.to_string());
                push("k2", k2.to_string());
                push("h1", h1.to_string());
                push("h2", h2.to_string());
            }
        }
        push("N", self.n_samples()?.to_string());
        if let Some(ts) = self.run.sample_period {
            push("T_s", ts.to_string());
        }
        match self.noise {
            Some(NoiseConfig::SnrDb(db)) => push("snr_db", db.to_string()),
            Some(NoiseConfig::Sigma(s)) => push("sigma", s.to_string()),
            None => {}
        }
        push("n_trials", self.run.trials.to_string());
        push("seed", self.run.seed.to_string());
        push(
            "alpha",
            self.detectors
                .alpha
                .map_or("auto".into(), |a| a.to_string()),
        );
        Ok(out)
    }
}

/// Probabilities derived as `1 − T_s·λ` pick up rounding noise in the last
/// bits; twelve significant digits are plenty for a header.
fn fmt_prob(p: f64) -> String {
    let rounded: f64 = format!("{p:.12}").parse().unwrap_or(p);
    rounded.to_string()
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.model {
            ModelConfig::Telegraph {
                amplitude,
                transitions,
            } => {
                writeln!(f, "model.type = telegraph")?;
                writeln!(f, "model.amplitude = {amplitude}")?;
                match transitions {
                    TelegraphTransitions::Probabilities { p, q } => {
                        writeln!(f, "model.p = {p}")?;
                        writeln!(f, "model.q = {q}")?;
                    }
                    TelegraphTransitions::Rate { lambda } => {
                        writeln!(f, "model.lambda = {lambda}")?
                    }
                }
            }
            ModelConfig::Walk {
                half_states,
                scale,
                k1,
                k2,
                h1,
                h2,
            } => {
                writeln!(f, "model.type = walk")?;
                writeln!(f, "model.m = {half_states}")?;
                match scale {
                    WalkScale::Step(s) => writeln!(f, "model.step = {s}")?,
                    WalkScale::Amplitude(a) => writeln!(f, "model.amplitude = {a}")?,
                }
                writeln!(f, "model.k1 = {k1}")?;
                writeln!(f, "model.k2 = {k2}")?;
                writeln!(f, "model.h1 = {h1}")?;
                writeln!(f, "model.h2 = {h2}")?;
            }
        }
        match self.noise {
            Some(NoiseConfig::SnrDb(db)) => writeln!(f, "noise.snr_db = {db}")?,
            Some(NoiseConfig::Sigma(s)) => writeln!(f, "noise.sigma = {s}")?,
            None => {}
        }
        match self.run.length {
            RecordLength::Samples(n) => writeln!(f, "run.n = {n}")?,
            RecordLength::Duration(t) => writeln!(f, "run.duration = {t}")?,
        }
        if let Some(ts) = self.run.sample_period {
            writeln!(f, "run.ts = {ts}")?;
        }
        writeln!(f, "run.trials = {}", self.run.trials)?;
        writeln!(f, "run.seed = {}", self.run.seed)?;
        writeln!(f, "run.pf = {}", self.run.pf)?;
        if !self.run.snr_grid.is_empty() {
            writeln!(f, "run.snr_grid = {}", join(&self.run.snr_grid))?;
        }
        writeln!(f, "detectors.list = {}", join(&self.detectors.list))?;
        match self.detectors.alpha {
            Some(a) => writeln!(f, "detectors.alpha = {a}")?,
            None => writeln!(f, "detectors.alpha = auto")?,
        }
        writeln!(f, "detectors.fit_paths = {}", self.detectors.fit_paths)
    }
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(s: &str) -> CResult<Self> {
        Self::parse(s)
    }
}
