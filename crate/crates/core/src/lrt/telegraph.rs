use crate::error::{invalid, Error, Result};
use crate::signal_models::check_sigma;
use crate::statistic::Statistic;

/// Predictive probabilities `R_k(±A) = P(ζ_k = ±A | y_{k−1}, …, y_0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelegraphPosterior {
    pub r_plus: f64,
    pub r_minus: f64,
}

impl TelegraphPosterior {
    /// `R_0(A) = R_0(−A) = ½`.
    pub fn uniform() -> Self {
        Self::from_plus(0.5)
    }

    pub fn from_plus(r_plus: f64) -> Self {
        Self {
            r_plus,
            r_minus: 1.0 - r_plus,
        }
    }
}

/// Recursive log-LRT for the two-state telegraph model with known
/// `(A, σ, p, q)`.
///
/// The statistic is `Σ_k ln[R_k(A)·e^{A y_k/σ²} + R_k(−A)·e^{−A y_k/σ²}]`,
/// i.e. the exact log-likelihood ratio plus the data-independent constant
/// `N·A²/(2σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelegraphLrt {
    a_over_var: f64,
    p: f64,
    q: f64,
}

impl TelegraphLrt {
    pub fn new(amplitude: f64, sigma: f64, p: f64, q: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if !amplitude.is_finite() {
            return Err(invalid("amplitude", "must be finite"));
        }
        for (name, v) in [("p", p), ("q", q)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(name, format!("must lie in [0, 1], got {v}")));
            }
        }
        Ok(Self {
            a_over_var: amplitude / (sigma * sigma),
            p,
            q,
        })
    }

    pub fn log_lrt(&self, y: &[f64]) -> Result<f64> {
        if y.is_empty() {
            return Err(Error::EmptyInput("rt-lrt"));
        }
        let s = self.a_over_var;
        Ok(forward(y, self.p, self.q, |v| (s * v, -s * v)))
    }

    pub fn step(&self, prev: TelegraphPosterior, y_prev: f64) -> TelegraphPosterior {
        let s = self.a_over_var * y_prev;
        let (_, star) = absorb(prev.r_plus, s, -s);
        TelegraphPosterior::from_plus(predict(star, self.p, self.q))
    }
}

/// Folds one observation into `R(A)`: returns `ln(R(A)e^{l+} + R(−A)e^{l−})`
/// and the filtered probability `★` of `+A`.
#[inline]
fn absorb(r_plus: f64, log_w_plus: f64, log_w_minus: f64) -> (f64, f64) {
    let r_minus = 1.0 - r_plus;
    if log_w_plus >= log_w_minus {
        let e = (log_w_minus - log_w_plus).exp();
        let denom = r_plus + r_minus * e;
        (log_w_plus + denom.ln(), r_plus / denom)
    } else {
        let e = (log_w_plus - log_w_minus).exp();
        let denom = r_plus * e + r_minus;
        (log_w_minus + denom.ln(), r_plus * e / denom)
    }
}

/// `R_k(A) = p·★ + (1 − q)·(1 − ★)`.
#[inline]
fn predict(star: f64, p: f64, q: f64) -> f64 {
    p * star + (1.0 - q) * (1.0 - star)
}

/// Forward recursion over arbitrary per-sample log-weights `(l+, l−)`.
pub(crate) fn forward(y: &[f64], p: f64, q: f64, log_weights: impl Fn(f64) -> (f64, f64)) -> f64 {
    let mut r_plus = 0.5;
    let mut total = 0.0;
    for &v in y {
        let (lp, lm) = log_weights(v);
        let (term, star) = absorb(r_plus, lp, lm);
        total += term;
        r_plus = predict(star, p, q);
    }
    total
}

/// One step of the `R_k` recursion given the previous predictive
/// probabilities and the previous observation.
pub fn rt_posterior_step(
    prev: TelegraphPosterior,
    y_prev: f64,
    amplitude: f64,
    sigma: f64,
    p: f64,
    q: f64,
) -> Result<TelegraphPosterior> {
    Ok(TelegraphLrt::new(amplitude, sigma, p, q)?.step(prev, y_prev))
}

/// Log-LRT of the telegraph model, `O(N)`, starting from `R_0 = (½, ½)`.
pub fn rt_log_lrt(y: &[f64], amplitude: f64, sigma: f64, p: f64, q: f64) -> Result<Statistic> {
    let lrt = TelegraphLrt::new(amplitude, sigma, p, q)?;
    Ok(Statistic::new("rt-lrt", lrt.log_lrt(y)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn symmetric_fixed_point() {
        let next =
            rt_posterior_step(TelegraphPosterior::uniform(), 0.0, 1.0, 1.0, 0.8, 0.8).unwrap();
        assert!((next.r_plus - 0.5).abs() < 1e-15);
        assert!((next.r_minus - 0.5).abs() < 1e-15);
    }

    #[test]
    fn large_observation_saturates_to_p() {
        let (a, sigma, p, q) = (0.5, 2.0, 0.93, 0.71);
        let y = 1e6 * sigma * sigma / a;
        let next = rt_posterior_step(TelegraphPosterior::uniform(), y, a, sigma, p, q).unwrap();
        assert!((next.r_plus - p).abs() < 1e-12);
        let next = rt_posterior_step(TelegraphPosterior::uniform(), -y, a, sigma, p, q).unwrap();
        assert!((next.r_plus - (1.0 - q)).abs() < 1e-12);
    }

    #[test]
    fn general_step_matches_direct_formula() {
        let (p, q, a, sigma, y) = (0.7, 0.6, 1.0, 1.0, 0.3);
        let prev = TelegraphPosterior::uniform();
        let next = rt_posterior_step(prev, y, a, sigma, p, q).unwrap();
        let ep = (a * y / (sigma * sigma)).exp();
        let em = (-a * y / (sigma * sigma)).exp();
        let star = ep * 0.5 / (ep * 0.5 + em * 0.5);
        let direct = p * star + (1.0 - q) * (1.0 - star);
        assert!((next.r_plus - direct).abs() < 1e-15);
        assert!((next.r_plus + next.r_minus - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_sample_is_ln_cosh() {
        for (a, sigma, y) in [(1.0, 1.0, 0.3), (0.2, 3.0, -4.0), (5.0, 0.5, 1.7)] {
            let stat = rt_log_lrt(&[y], a, sigma, 0.9, 0.6).unwrap();
            let expected = (a * y / (sigma * sigma)).cosh().ln();
            assert!((stat.value - expected).abs() < 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn zero_input_symmetric_is_zero() {
        let stat = rt_log_lrt(&[0.0; 100], 1.0, 1.0, 0.9995, 0.9995).unwrap();
        assert_eq!(stat.value, 0.0);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(rt_log_lrt(&[], 1.0, 1.0, 0.9, 0.9).is_err());
        assert!(rt_log_lrt(&[1.0], 1.0, 0.0, 0.9, 0.9).is_err());
    }

    #[test]
    fn extreme_observations_stay_finite() {
        let y: Vec<f64> = (0..1000)
            .map(|i| if i % 7 == 0 { 1e5 } else { -3e4 })
            .collect();
        let stat = rt_log_lrt(&y, 1.0, 0.01, 0.999, 0.99).unwrap();
        assert!(stat.value.is_finite());
    }

    #[test]
    fn constant_log_weight_shift_cancels() {
        let (a, sigma, p, q) = (0.3, 1.3, 0.97, 0.9);
        let y: Vec<f64> = (0..500)
            .map(|i| ((i * 37 % 101) as f64 / 50.0) - 1.0)
            .collect();
        let s = a / (sigma * sigma);
        let plain = forward(&y, p, q, |v| (s * v, -s * v));
        // Full Gaussian log-densities, normalizer included, not relative to H0.
        let norm = -(sigma * (2.0 * std::f64::consts::PI).sqrt()).ln();
        let logpdf = |x: f64, mu: f64| norm - (x - mu).powi(2) / (2.0 * sigma * sigma);
        let with_norm = forward(&y, p, q, |v| (logpdf(v, a), logpdf(v, -a)));
        let correction = y.iter().map(|&v| logpdf(v, 0.0)).sum::<f64>()
            - y.len() as f64 * a * a / (2.0 * sigma * sigma);
        assert!((with_norm - correction - plain).abs() < 1e-10 * plain.abs().max(1.0));
    }

    proptest! {
        #[test]
        fn posterior_stays_in_transition_hull(
            r in 0.0f64..=1.0, y in -50.0f64..50.0,
            p in 0.01f64..0.99, q in 0.01f64..0.99,
            a in 0.01f64..5.0, sigma in 0.1f64..5.0,
        ) {
            let next = rt_posterior_step(TelegraphPosterior::from_plus(r), y, a, sigma, p, q).unwrap();
            let lo = p.min(1.0 - q);
            let hi = p.max(1.0 - q);
            prop_assert!(next.r_plus >= lo - 1e-12 && next.r_plus <= hi + 1e-12);
            prop_assert!((next.r_plus + next.r_minus - 1.0).abs() < 1e-12);
        }
    }
}
