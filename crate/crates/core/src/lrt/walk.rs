use crate::error::{Error, Result};
use crate::signal_models::{check_sigma, WalkModel};
use crate::statistic::Statistic;

/// Predictive distribution `R_k` over the `2M+1` walk states.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPosterior {
    pub probs: Vec<f64>,
}

impl WalkPosterior {
    /// `R_0`: mass ½ on each of the states `−s` and `+s`.
    pub fn initial(model: &WalkModel) -> Self {
        let m = model.half_states();
        let mut probs = vec![0.0; model.n_states()];
        probs[m - 1] = 0.5;
        probs[m + 1] = 0.5;
        Self { probs }
    }
}

/// Exponent budget below which weights are formed by repeated
/// multiplication instead of one `exp` per state.
const FAST_EXPONENT_LIMIT: f64 = 300.0;

/// Forward recursion of the random-walk LRT for a fixed model and `σ`.
///
/// Per-state weights are `W_j / f_w(y) = exp(y·x_j/σ² − x_j²/(2σ²))`, i.e.
/// the Gaussian normalizer and the noise-only density are factored out, so
/// the center state always has weight one.
#[derive(Debug, Clone)]
pub struct WalkLrt {
    half_states: usize,
    step: f64,
    inv_var: f64,
    values: Vec<f64>,
    /// `x_j²/(2σ²)`.
    quad: Vec<f64>,
    /// `exp(−x_j²/(2σ²))`, used on the fast path.
    damping: Vec<f64>,
    down: Vec<f64>,
    up: Vec<f64>,
}

impl WalkLrt {
    pub fn new(model: &WalkModel, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        let inv_var = 1.0 / (sigma * sigma);
        let values = model.state_values();
        let quad: Vec<f64> = values.iter().map(|x| 0.5 * x * x * inv_var).collect();
        let damping = quad.iter().map(|q| (-q).exp()).collect();
        let n = model.n_states();
        Ok(Self {
            half_states: model.half_states(),
            step: model.step(),
            inv_var,
            values,
            quad,
            damping,
            down: (0..n).map(|i| model.down_prob(i)).collect(),
            up: (0..n).map(|i| model.up_prob(i)).collect(),
        })
    }

    fn n_states(&self) -> usize {
        self.values.len()
    }

    /// Log-weights `ln(W_j/f_w(y))` for every state.
    pub fn log_weights(&self, y: f64) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.quad)
            .map(|(x, q)| y * x * self.inv_var - q)
            .collect()
    }

    /// Multiplies `prev` by the weights of `y` into `scratch` (only on the
    /// states `start, start+stride, …`) and returns `(ln Σ, Σ)` where `Σ`
    /// is the sum of the shifted products.
    fn absorb(
        &self,
        prev: &[f64],
        y: f64,
        start: usize,
        stride: usize,
        scratch: &mut [f64],
    ) -> Result<(f64, f64)> {
        let n = self.n_states();
        let m = self.half_states;
        let slope = y * self.step * self.inv_var;
        let fast =
            slope.abs() * m as f64 <= FAST_EXPONENT_LIMIT && self.quad[0] <= FAST_EXPONENT_LIMIT;
        let mut total = 0.0;
        let mut shift = 0.0;
        if fast {
            let g = slope.exp();
            let g_stride = g.powi(stride as i32);
            let mut w = g.powi(start as i32 - m as i32);
            for j in (start..n).step_by(stride) {
                let u = prev[j] * w * self.damping[j];
                scratch[j] = u;
                total += u;
                w *= g_stride;
            }
        } else {
            shift = f64::NEG_INFINITY;
            for j in (start..n).step_by(stride) {
                if prev[j] > 0.0 {
                    let l = y * self.values[j] * self.inv_var - self.quad[j];
                    scratch[j] = l;
                    shift = shift.max(l);
                }
            }
            for j in (start..n).step_by(stride) {
                let u = if prev[j] > 0.0 {
                    prev[j] * (scratch[j] - shift).exp()
                } else {
                    0.0
                };
                scratch[j] = u;
                total += u;
            }
        }
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Numerical(format!(
                "walk posterior weight degenerated to {total}"
            )));
        }
        Ok((shift + total.ln(), total))
    }

    /// `next = Q·(u/Σu)` with the tridiagonal stencil.
    fn predict(&self, u: &[f64], total: f64, start: usize, stride: usize, next: &mut [f64]) {
        let n = self.n_states();
        next.iter_mut().for_each(|v| *v = 0.0);
        let inv = 1.0 / total;
        for j in (start..n).step_by(stride) {
            let mass = u[j] * inv;
            if j > 0 {
                next[j - 1] += mass * self.down[j];
            }
            if j + 1 < n {
                next[j + 1] += mass * self.up[j];
            }
        }
    }

    /// One full step for an arbitrary predictive distribution.
    pub fn step(&self, prev: &WalkPosterior, y_prev: f64) -> Result<WalkPosterior> {
        let n = self.n_states();
        let mut scratch = vec![0.0; n];
        let (_, total) = self.absorb(&prev.probs, y_prev, 0, 1, &mut scratch)?;
        let mut next = vec![0.0; n];
        self.predict(&scratch, total, 0, 1, &mut next);
        Ok(WalkPosterior { probs: next })
    }

    /// `Σ_k ln[(R_k·W_k)/(W_k)_center]`, `O(M·N)`.
    pub fn log_lrt(&self, y: &[f64]) -> Result<f64> {
        if y.is_empty() {
            return Err(Error::EmptyInput("rw-lrt"));
        }
        let n = self.n_states();
        let m = self.half_states;
        let mut probs = vec![0.0; n];
        probs[m - 1] = 0.5;
        probs[m + 1] = 0.5;
        let mut scratch = vec![0.0; n];
        let mut next = vec![0.0; n];
        // Support alternates parity: at step k only indices ≡ M+1+k (mod 2).
        let mut parity = (m + 1) % 2;
        let mut log_lrt = 0.0;
        for &v in y {
            let (term, total) = self.absorb(&probs, v, parity, 2, &mut scratch)?;
            log_lrt += term;
            self.predict(&scratch, total, parity, 2, &mut next);
            std::mem::swap(&mut probs, &mut next);
            parity ^= 1;
        }
        Ok(log_lrt)
    }
}

/// Normalize `prev ∗ W` and apply `Q = Pᵀ` given explicit log-weights.
#[cfg(test)]
fn step_with_log_weights(lrt: &WalkLrt, prev: &[f64], log_w: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = prev.len();
    let shift = log_w
        .iter()
        .zip(prev)
        .filter(|(_, r)| **r > 0.0)
        .map(|(l, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    let u: Vec<f64> = prev
        .iter()
        .zip(log_w)
        .map(|(r, l)| if *r > 0.0 { r * (l - shift).exp() } else { 0.0 })
        .collect();
    let total: f64 = u.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::Numerical("walk posterior weight underflow".into()));
    }
    let mut next = vec![0.0; n];
    lrt.predict(&u, total, 0, 1, &mut next);
    Ok((shift + total.ln(), next))
}

pub fn rw_posterior_step(
    prev: &WalkPosterior,
    y_prev: f64,
    model: &WalkModel,
    sigma: f64,
) -> Result<WalkPosterior> {
    if prev.probs.len() != model.n_states() {
        return Err(Error::LengthMismatch {
            expected: model.n_states(),
            actual: prev.probs.len(),
        });
    }
    WalkLrt::new(model, sigma)?.step(prev, y_prev)
}

pub fn rw_log_lrt(y: &[f64], model: &WalkModel, sigma: f64) -> Result<Statistic> {
    Ok(Statistic::new(
        "rw-lrt",
        WalkLrt::new(model, sigma)?.log_lrt(y)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn f_w(x: f64, sigma: f64) -> f64 {
        (-(x * x) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    }

    #[test]
    fn equal_weights_apply_q() {
        let model = WalkModel::new(3, 1.0, 0.3, 0.7, 0.6, 0.4, 10).unwrap();
        let lrt = WalkLrt::new(&model, 1.0).unwrap();
        let prev = vec![0.1, 0.05, 0.2, 0.15, 0.1, 0.3, 0.1];
        let (_, next) = step_with_log_weights(&lrt, &prev, &[0.0; 7]).unwrap();
        let p = model.transition_matrix();
        for k in 0..7 {
            let qk: f64 = (0..7).map(|j| p[j][k] * prev[j]).sum();
            assert!((next[k] - qk).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_mass_moves_inward() {
        let model = WalkModel::symmetric(2, 1.0, 0.5, 10).unwrap();
        let mut probs = vec![0.0; 5];
        probs[0] = 1.0;
        let next = rw_posterior_step(&WalkPosterior { probs }, 0.7, &model, 1.0).unwrap();
        assert_eq!(next.probs, vec![0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn step_matches_dense_evaluation() {
        let model = WalkModel::symmetric(1, 0.8, 0.5, 10).unwrap();
        let sigma = 0.9;
        let prev = vec![0.2, 0.5, 0.3];
        let y = 0.35;
        let next = rw_posterior_step(
            &WalkPosterior {
                probs: prev.clone(),
            },
            y,
            &model,
            sigma,
        )
        .unwrap();
        let states = model.state_values();
        let w = DVector::from_iterator(3, states.iter().map(|x| f_w(y - x, sigma)));
        let r = DVector::from_vec(prev);
        let p = model.transition_matrix();
        let q = DMatrix::from_fn(3, 3, |i, j| p[j][i]);
        let expected = q * w.component_mul(&r) / w.dot(&r);
        for k in 0..3 {
            assert!((next.probs[k] - expected[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn single_sample_closed_forms() {
        let model = WalkModel::symmetric(1, 0.6, 0.5, 10).unwrap();
        let (sigma, y) = (1.1, 0.4);
        let stat = rw_log_lrt(&[y], &model, sigma).unwrap();
        let expected =
            ((0.5 * f_w(y + 0.6, sigma) + 0.5 * f_w(y - 0.6, sigma)) / f_w(y, sigma)).ln();
        assert!((stat.value - expected).abs() < 1e-12);

        let zero = rw_log_lrt(&[0.0], &model, sigma).unwrap();
        assert!((zero.value + 0.36 / (2.0 * sigma * sigma)).abs() < 1e-14);
    }

    #[test]
    fn fast_and_log_domain_paths_agree() {
        let model = WalkModel::new(6, 0.5, 0.45, 0.55, 0.45, 0.55, 10).unwrap();
        let lrt = WalkLrt::new(&model, 0.8).unwrap();
        let mut prev = vec![0.0; 13];
        for (j, v) in prev.iter_mut().enumerate() {
            *v = (j + 1) as f64 / 91.0;
        }
        for y in [-3.0, -0.2, 0.0, 0.9, 4.0] {
            let fast = lrt
                .step(
                    &WalkPosterior {
                        probs: prev.clone(),
                    },
                    y,
                )
                .unwrap();
            let (_, slow) = step_with_log_weights(&lrt, &prev, &lrt.log_weights(y)).unwrap();
            for (a, b) in fast.probs.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn extreme_snr_uses_log_domain() {
        let model = WalkModel::symmetric(4, 10.0, 0.5, 10).unwrap();
        let y = vec![40.0, 30.0, 20.0, -1e4, 30.0];
        let stat = rw_log_lrt(&y, &model, 0.05).unwrap();
        assert!(stat.value.is_finite());
    }

    #[test]
    fn normalizer_cancels() {
        let model = WalkModel::new(3, 0.4, 0.45, 0.55, 0.45, 0.55, 10).unwrap();
        let sigma = 1.3;
        let lrt = WalkLrt::new(&model, sigma).unwrap();
        let y: Vec<f64> = (0..300)
            .map(|i| ((i * 53 % 97) as f64 / 40.0) - 1.2)
            .collect();
        let plain = lrt.log_lrt(&y).unwrap();

        let norm = -(sigma * (2.0 * std::f64::consts::PI).sqrt()).ln();
        let mut probs = WalkPosterior::initial(&model).probs;
        let mut total = 0.0;
        for &v in &y {
            // Full Gaussian log-densities; the noise-only density is
            // subtracted afterwards.
            let log_w: Vec<f64> = model
                .state_values()
                .iter()
                .map(|x| norm - (v - x).powi(2) / (2.0 * sigma * sigma))
                .collect();
            let (term, next) = step_with_log_weights(&lrt, &probs, &log_w).unwrap();
            total += term - (norm - v * v / (2.0 * sigma * sigma));
            probs = next;
        }
        assert!((total - plain).abs() < 1e-10 * plain.abs().max(1.0));
    }

    #[test]
    fn empty_and_mismatch_rejected() {
        let model = WalkModel::symmetric(2, 1.0, 0.5, 10).unwrap();
        assert!(rw_log_lrt(&[], &model, 1.0).is_err());
        let bad = WalkPosterior {
            probs: vec![1.0; 3],
        };
        assert!(rw_posterior_step(&bad, 0.0, &model, 1.0).is_err());
    }
}
