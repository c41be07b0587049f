use super::{SignalPath, WalkModel};
use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, substream_seed, Stream};

/// `p = 1 − T_s·λ`: matches the expected number of transitions of a
/// Poisson telegraph with rate `λ` sampled every `T_s` seconds.
///
/// `λ = 0` is accepted and yields `p = 1` (not a valid [`TelegraphModel`]
/// parameter, but a well-defined value).
///
/// [`TelegraphModel`]: super::TelegraphModel
pub fn telegraph_p_from_rate(lambda: f64, sample_period: f64) -> Result<f64> {
    if !(sample_period.is_finite() && sample_period > 0.0) {
        return Err(invalid(
            "sample_period",
            format!("must be > 0, got {sample_period}"),
        ));
    }
    let product = sample_period * lambda;
    if !(0.0..1.0).contains(&product) {
        return Err(invalid(
            "lambda",
            format!("T_s·λ must lie in [0, 1), got {product}"),
        ));
    }
    Ok(1.0 - product)
}

/// Pole `α = (1 − sin ω_c)/cos ω_c` of the single-pole low-pass filter with
/// −3 dB bandwidth `ω_c` (rad/sample).
pub fn alpha_from_bandwidth(omega_c: f64) -> Result<f64> {
    if !(omega_c > 0.0 && omega_c < std::f64::consts::FRAC_PI_2) {
        return Err(invalid(
            "omega_c",
            format!("must lie in (0, π/2), got {omega_c}"),
        ));
    }
    Ok((1.0 - omega_c.sin()) / omega_c.cos())
}

/// Frequency-shift amplitude `A = ½·ω₀·|μG²/(k·B₁)|` in rad/s.
pub fn physical_amplitude(spring_k: f64, omega0: f64, b1: f64, gradient: f64, mu: f64) -> f64 {
    0.5 * omega0 * (mu * gradient * gradient / (spring_k * b1)).abs()
}

/// Result of matching a symmetric telegraph autocorrelation `(2p−1)^k`
/// to an empirical one.
#[derive(Debug, Clone, PartialEq)]
pub struct TelegraphFit {
    pub p: f64,
    /// LPF pole `α = 2p − 1`.
    pub alpha: f64,
    /// Empirical normalized autocorrelation at lags `0..=max_lag`.
    pub autocorrelation: Vec<f64>,
}

impl TelegraphFit {
    pub fn max_lag(&self) -> usize {
        self.autocorrelation.len() - 1
    }
}

/// Pooled autocovariance sums; paths are absorbed one at a time so
/// calibration never holds more than one path in memory.
struct AutocorrAccumulator {
    max_lag: usize,
    products: Vec<f64>,
    heads: Vec<f64>,
    tails: Vec<f64>,
    pairs: Vec<f64>,
    sum: f64,
    count: f64,
}

impl AutocorrAccumulator {
    fn new(max_lag: usize) -> Self {
        Self {
            max_lag,
            products: vec![0.0; max_lag + 1],
            heads: vec![0.0; max_lag + 1],
            tails: vec![0.0; max_lag + 1],
            pairs: vec![0.0; max_lag + 1],
            sum: 0.0,
            count: 0.0,
        }
    }

    fn add(&mut self, x: &[f64]) {
        let n = x.len();
        let total: f64 = x.iter().sum();
        self.sum += total;
        self.count += n as f64;
        for k in 0..=self.max_lag.min(n.saturating_sub(1)) {
            let prod: f64 = x[..n - k].iter().zip(&x[k..]).map(|(a, b)| a * b).sum();
            self.products[k] += prod;
            self.heads[k] += x[..n - k].iter().sum::<f64>();
            self.tails[k] += x[k..].iter().sum::<f64>();
            self.pairs[k] += (n - k) as f64;
        }
    }

    fn finish(&self) -> Result<Vec<f64>> {
        if self.count == 0.0 {
            return Err(Error::EmptyInput("no samples for autocorrelation"));
        }
        let mu = self.sum / self.count;
        let cov: Vec<f64> = (0..=self.max_lag)
            .map(|k| {
                if self.pairs[k] == 0.0 {
                    return f64::NAN;
                }
                (self.products[k] - mu * (self.heads[k] + self.tails[k]) + self.pairs[k] * mu * mu)
                    / self.pairs[k]
            })
            .collect();
        if cov[0].is_nan() || cov[0] <= 0.0 {
            return Err(Error::Numerical("paths have zero variance".into()));
        }
        if cov.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numerical(
                "paths too short for the requested lags".into(),
            ));
        }
        Ok(cov.iter().map(|c| c / cov[0]).collect())
    }
}

/// Pooled, mean-removed, normalized autocorrelation `ρ̂(0..=max_lag)`.
pub fn empirical_autocorrelation(paths: &[SignalPath], max_lag: usize) -> Result<Vec<f64>> {
    let mut acc = AutocorrAccumulator::new(max_lag);
    for p in paths {
        acc.add(&p.values);
    }
    acc.finish()
}

fn fit_lag_count(n: usize) -> usize {
    (n / 10).min(50)
}

/// Least-squares fit of `c^k` to `ρ̂(k)`, `k = 1..=L`, over `c ∈ (−1, 1)`.
fn fit_geometric(rho: &[f64]) -> f64 {
    let objective = |c: f64| -> f64 {
        let mut ck = 1.0;
        rho.iter()
            .skip(1)
            .map(|r| {
                ck *= c;
                (r - ck).powi(2)
            })
            .sum()
    };
    const EDGE: f64 = 1e-12;
    const GRID: usize = 4000;
    let lo = -1.0 + EDGE;
    let hi = 1.0 - EDGE;
    let h = (hi - lo) / GRID as f64;
    let best = (0..=GRID)
        .map(|i| lo + h * i as f64)
        .min_by(|a, b| objective(*a).total_cmp(&objective(*b)))
        .unwrap_or(0.0);
    // golden-section refinement inside the winning grid cell pair
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    (0.5 * (a + b)).clamp(lo, hi)
}

fn fit_from_accumulator(acc: &AutocorrAccumulator) -> Result<TelegraphFit> {
    let rho = acc.finish()?;
    let c = fit_geometric(&rho);
    let p = 0.5 * (1.0 + c);
    Ok(TelegraphFit {
        p,
        alpha: 2.0 * p - 1.0,
        autocorrelation: rho,
    })
}

/// Fit the symmetric telegraph parameter `p̂` whose autocorrelation
/// `(2p̂−1)^k` best matches the pooled empirical autocorrelation of
/// `paths` on lags `1..=L`, `L = min(50, N/10)`.
pub fn fit_telegraph_p(paths: &[SignalPath]) -> Result<TelegraphFit> {
    let n = paths
        .iter()
        .map(SignalPath::len)
        .min()
        .ok_or(Error::EmptyInput("no paths to fit"))?;
    let lags = fit_lag_count(n);
    if lags == 0 {
        return Err(invalid("paths", "need at least 10 samples per path"));
    }
    let mut acc = AutocorrAccumulator::new(lags);
    for p in paths {
        acc.add(&p.values);
    }
    fit_from_accumulator(&acc)
}

/// Calibrate the surrogate telegraph `p̂` and LPF pole `α = 2p̂ − 1` for a
/// symmetric random walk from `n_paths` simulated realizations.
pub fn fit_telegraph_alpha_to_walk(
    model: &WalkModel,
    n_paths: usize,
    seed: u64,
) -> Result<TelegraphFit> {
    if !model.is_symmetric() {
        return Err(invalid(
            "walk",
            "autocorrelation calibration requires K1 = H2 and K2 = H1",
        ));
    }
    fit_walk_paths(model, n_paths, seed)
}

/// Same fit without the symmetry requirement (mean is removed before the
/// autocorrelation is formed).
pub fn fit_walk_paths(model: &WalkModel, n_paths: usize, seed: u64) -> Result<TelegraphFit> {
    if n_paths == 0 {
        return Err(invalid("n_paths", "must be at least 1"));
    }
    let lags = fit_lag_count(model.n_samples());
    if lags == 0 {
        return Err(invalid("n_samples", "need at least 10 samples per path"));
    }
    let mut acc = AutocorrAccumulator::new(lags);
    for i in 0..n_paths {
        let mut rng = rng_from_seed(substream_seed(seed, i as u64, Stream::Calibration));
        acc.add(&model.generate_with(&mut rng).values);
    }
    fit_from_accumulator(&acc)
}
