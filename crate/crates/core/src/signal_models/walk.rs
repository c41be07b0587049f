use rand::Rng;

use super::{check_probability, ModelTag, SignalPath};
use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, SimRng};

/// Reflecting random walk on the `2M+1` states `(i − M)·s`, `i = 0..=2M`.
///
/// Rows are split into a lower quartile (down with `K1`, up with `K2`), a
/// middle band (±1 with probability ½) and an upper quartile (down with
/// `H1`, up with `H2`). With `c = ⌈M/2⌉` the lower quartile is rows
/// `1..=c−1`, the middle band rows `c..=2M−c` and the upper quartile rows
/// `2M−c+1..=2M−1`; for even `M` this is exactly `i < M/2`,
/// `M/2 ≤ i ≤ 3M/2`, `i > 3M/2`. Rows `0` and `2M` reflect with
/// probability one.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkModel {
    half_states: usize,
    step: f64,
    k1: f64,
    k2: f64,
    h1: f64,
    h2: f64,
    n_samples: usize,
    /// `P[i][i−1]` for every row; `P[i][i+1] = 1 − down[i]`.
    down: Vec<f64>,
}

const PROB_SUM_TOL: f64 = 1e-12;

impl WalkModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        half_states: usize,
        step: f64,
        k1: f64,
        k2: f64,
        h1: f64,
        h2: f64,
        n_samples: usize,
    ) -> Result<Self> {
        if half_states == 0 {
            return Err(invalid("half_states", "M must be at least 1"));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(invalid(
                "step",
                format!("must be finite and > 0, got {step}"),
            ));
        }
        check_probability("k1", k1)?;
        check_probability("k2", k2)?;
        check_probability("h1", h1)?;
        check_probability("h2", h2)?;
        if (k1 + k2 - 1.0).abs() > PROB_SUM_TOL {
            return Err(invalid(
                "k1",
                format!("K1 + K2 must equal 1, got {}", k1 + k2),
            ));
        }
        if (h1 + h2 - 1.0).abs() > PROB_SUM_TOL {
            return Err(invalid(
                "h1",
                format!("H1 + H2 must equal 1, got {}", h1 + h2),
            ));
        }
        if n_samples == 0 {
            return Err(invalid("n_samples", "must be at least 1"));
        }
        let m = half_states;
        let c = m.div_ceil(2);
        let last = 2 * m;
        let down = (0..=last)
            .map(|i| {
                if i == 0 {
                    0.0
                } else if i == last {
                    1.0
                } else if i < c {
                    k1
                } else if i <= last - c {
                    0.5
                } else {
                    h1
                }
            })
            .collect();
        Ok(Self {
            half_states,
            step,
            k1,
            k2,
            h1,
            h2,
            n_samples,
            down,
        })
    }

    /// Symmetric-walk shorthand: `K1 = H2 = outward`, `K2 = H1 = 1 − outward`.
    pub fn symmetric(
        half_states: usize,
        step: f64,
        outward: f64,
        n_samples: usize,
    ) -> Result<Self> {
        Self::new(
            half_states,
            step,
            outward,
            1.0 - outward,
            1.0 - outward,
            outward,
            n_samples,
        )
    }

    pub fn half_states(&self) -> usize {
        self.half_states
    }

    pub fn n_states(&self) -> usize {
        2 * self.half_states + 1
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// `(K1, K2, H1, H2)`.
    pub fn quartile_probabilities(&self) -> (f64, f64, f64, f64) {
        (self.k1, self.k2, self.h1, self.h2)
    }

    pub fn is_symmetric(&self) -> bool {
        (self.k1 - self.h2).abs() <= PROB_SUM_TOL && (self.k2 - self.h1).abs() <= PROB_SUM_TOL
    }

    pub fn with_n_samples(mut self, n_samples: usize) -> Result<Self> {
        if n_samples == 0 {
            return Err(invalid("n_samples", "must be at least 1"));
        }
        self.n_samples = n_samples;
        Ok(self)
    }

    /// Signal value of state index `i`.
    pub fn state_value(&self, i: usize) -> f64 {
        (i as f64 - self.half_states as f64) * self.step
    }

    pub fn state_values(&self) -> Vec<f64> {
        (0..self.n_states()).map(|i| self.state_value(i)).collect()
    }

    /// `P[i][i−1]`.
    pub fn down_prob(&self, i: usize) -> f64 {
        self.down[i]
    }

    /// `P[i][i+1]`.
    pub fn up_prob(&self, i: usize) -> f64 {
        1.0 - self.down[i]
    }

    /// Dense row-stochastic transition matrix `P`, `P[j][k] = P(k | j)`.
    pub fn transition_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.n_states();
        (0..n)
            .map(|i| {
                let mut row = vec![0.0; n];
                if i > 0 {
                    row[i - 1] = self.down_prob(i);
                }
                if i + 1 < n {
                    row[i + 1] = self.up_prob(i);
                }
                row
            })
            .collect()
    }

    pub fn stationary_power(&self) -> Result<f64> {
        let pi = stationary_distribution(self)?;
        Ok(pi
            .iter()
            .enumerate()
            .map(|(i, w)| w * self.state_value(i).powi(2))
            .sum())
    }

    pub fn stationary_mean(&self) -> Result<f64> {
        let pi = stationary_distribution(self)?;
        Ok(pi
            .iter()
            .enumerate()
            .map(|(i, w)| w * self.state_value(i))
            .sum())
    }

    pub fn generate_with(&self, rng: &mut SimRng) -> SignalPath {
        let m = self.half_states;
        let mut state = if rng.random::<bool>() { m + 1 } else { m - 1 };
        let mut values = Vec::with_capacity(self.n_samples);
        values.push(self.state_value(state));
        for _ in 1..self.n_samples {
            if rng.random::<f64>() < self.down[state] {
                state -= 1;
            } else {
                state += 1;
            }
            values.push(self.state_value(state));
        }
        SignalPath {
            values,
            model: ModelTag::Walk,
        }
    }
}

/// Draw one walk path; identical `(model, seed)` give identical paths.
pub fn gen_random_walk(model: &WalkModel, seed: u64) -> SignalPath {
    model.generate_with(&mut rng_from_seed(seed))
}

/// Stationary distribution `π` of the walk (`πP = π`, `Σπ = 1`).
///
/// The chain is a birth-death chain, so `π` follows from detailed balance
/// `π_i·P[i][i+1] = π_{i+1}·P[i+1][i]`, accumulated in the log domain.
pub fn stationary_distribution(model: &WalkModel) -> Result<Vec<f64>> {
    let n = model.n_states();
    let mut log_pi = vec![0.0; n];
    for i in 0..n - 1 {
        let up = model.up_prob(i);
        let down = model.down_prob(i + 1);
        if up <= 0.0 || down <= 0.0 {
            return Err(Error::Numerical(format!(
                "transition matrix is not irreducible between states {i} and {}",
                i + 1
            )));
        }
        log_pi[i + 1] = log_pi[i] + up.ln() - down.ln();
    }
    let max = log_pi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut pi: Vec<f64> = log_pi.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= total);
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    /// Dense oracle: solve `(Pᵀ − I)π = 0` with the last equation replaced by `Σπ = 1`.
    fn dense_stationary(model: &WalkModel) -> Vec<f64> {
        let p = model.transition_matrix();
        let n = p.len();
        let mut a = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = p[j][i] - if i == j { 1.0 } else { 0.0 };
            }
        }
        for j in 0..n {
            a[(n - 1, j)] = 1.0;
        }
        let mut b = DVector::<f64>::zeros(n);
        b[n - 1] = 1.0;
        a.lu().solve(&b).unwrap().iter().cloned().collect()
    }

    #[test]
    fn rejects_invalid_probabilities() {
        assert!(WalkModel::new(2, 1.0, 0.4, 0.5, 0.5, 0.5, 10).is_err());
        assert!(WalkModel::new(2, 1.0, 0.5, 0.5, 0.3, 0.6, 10).is_err());
        assert!(WalkModel::new(0, 1.0, 0.5, 0.5, 0.5, 0.5, 10).is_err());
        assert!(WalkModel::new(2, 0.0, 0.5, 0.5, 0.5, 0.5, 10).is_err());
        assert!(WalkModel::new(2, 1.0, 1.0, 0.0, 0.5, 0.5, 10).is_err());
    }

    #[test]
    fn matrix_structure() {
        for m in 1..=9 {
            let model = WalkModel::new(m, 0.5, 0.45, 0.55, 0.45, 0.55, 10).unwrap();
            let p = model.transition_matrix();
            let n = 2 * m + 1;
            assert_eq!(p.len(), n);
            for (i, row) in p.iter().enumerate() {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
                for (j, v) in row.iter().enumerate() {
                    if i.abs_diff(j) != 1 {
                        assert_eq!(*v, 0.0);
                    }
                }
            }
            assert_eq!(p[0][1], 1.0);
            assert_eq!(p[2 * m][2 * m - 1], 1.0);
        }
    }

    #[test]
    fn even_m_quartiles_follow_table() {
        let model = WalkModel::new(8, 1.0, 0.3, 0.7, 0.6, 0.4, 10).unwrap();
        // i < M/2 = 4: K1 down; 4 ≤ i ≤ 12: ½; 12 < i ≤ 15: H1 down.
        for i in 1..4 {
            assert_eq!(model.down_prob(i), 0.3);
        }
        for i in 4..=12 {
            assert_eq!(model.down_prob(i), 0.5);
        }
        for i in 13..16 {
            assert_eq!(model.down_prob(i), 0.6);
        }
    }

    #[test]
    fn odd_m_quartiles() {
        // M = 5, c = 3: lower rows 1..=2, middle 3..=7, upper 8..=9.
        let model = WalkModel::new(5, 1.0, 0.3, 0.7, 0.6, 0.4, 10).unwrap();
        let down: Vec<f64> = (0..11).map(|i| model.down_prob(i)).collect();
        assert_eq!(
            down,
            vec![0.0, 0.3, 0.3, 0.5, 0.5, 0.5, 0.5, 0.5, 0.6, 0.6, 1.0]
        );
    }

    #[test]
    fn stationary_three_state() {
        let model = WalkModel::new(1, 1.0, 0.5, 0.5, 0.5, 0.5, 10).unwrap();
        let pi = stationary_distribution(&model).unwrap();
        let oracle = dense_stationary(&model);
        for (a, b) in pi.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in pi.iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_m2_boundary_half_mass() {
        let model = WalkModel::symmetric(2, 1.0, 0.5, 10).unwrap();
        let pi = stationary_distribution(&model).unwrap();
        let oracle = dense_stationary(&model);
        for (a, b) in pi.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((pi[0] - 0.5 * pi[1]).abs() < 1e-12);
        assert!((pi[4] - 0.5 * pi[3]).abs() < 1e-12);
        assert!((pi[1] - pi[2]).abs() < 1e-12);
    }

    #[test]
    fn stationary_matches_dense_solve_for_asymmetric_models() {
        for m in [2, 3, 6, 11] {
            let model = WalkModel::new(m, 0.3, 0.45, 0.55, 0.45, 0.55, 10).unwrap();
            let pi = stationary_distribution(&model).unwrap();
            assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let p = model.transition_matrix();
            for k in 0..pi.len() {
                let pk: f64 = (0..pi.len()).map(|j| pi[j] * p[j][k]).sum();
                assert!((pk - pi[k]).abs() < 1e-12);
            }
            for (a, b) in pi.iter().zip(dense_stationary(&model)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn boundary_row_reflects() {
        let model = WalkModel::symmetric(3, 1.0, 0.5, 10).unwrap();
        assert_eq!(model.down_prob(0), 0.0);
        assert_eq!(model.up_prob(0), 1.0);
        assert_eq!(model.down_prob(6), 1.0);
    }

    #[test]
    fn paths_stay_in_range_and_step_by_s() {
        let model = WalkModel::new(3, 0.25, 0.45, 0.55, 0.45, 0.55, 5000).unwrap();
        for seed in 0..5 {
            let path = gen_random_walk(&model, seed);
            assert_eq!(path.len(), 5000);
            let first = path.values[0];
            assert!((first.abs() - 0.25).abs() < 1e-15);
            for w in path.values.windows(2) {
                assert!(((w[1] - w[0]).abs() - 0.25).abs() < 1e-12);
            }
            assert!(path.values.iter().all(|v| v.abs() <= 0.75 + 1e-12));
        }
    }

    #[test]
    fn lower_boundary_moves_inward() {
        let model = WalkModel::symmetric(1, 1.0, 0.5, 20_000).unwrap();
        let path = gen_random_walk(&model, 9);
        for w in path.values.windows(2) {
            if w[0] == -1.0 {
                assert_eq!(w[1], 0.0);
            }
            if w[0] == 1.0 {
                assert_eq!(w[1], 0.0);
            }
        }
    }

    #[test]
    fn three_state_occupancy_converges() {
        let model = WalkModel::symmetric(1, 1.0, 0.5, 10_000).unwrap();
        let mut counts = [0usize; 3];
        for seed in 0..20 {
            for v in gen_random_walk(&model, seed).values {
                counts[(v + 1.0) as usize] += 1;
            }
        }
        let total = counts.iter().sum::<usize>() as f64;
        for (c, target) in counts.iter().zip([0.25, 0.5, 0.25]) {
            assert!((*c as f64 / total - target).abs() < 0.01);
        }
    }
}
