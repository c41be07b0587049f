//! Exhaustive path-enumeration oracles for small records.

use super::log_sum_exp;
use crate::error::{Error, Result};
use crate::signal_models::{check_sigma, WalkModel};
use crate::statistic::Statistic;

const RT_MAX_SAMPLES: usize = 20;
const RW_MAX_SAMPLES: usize = 12;
const RW_MAX_HALF_STATES: usize = 3;

fn log_gaussian(x: f64, mean: f64, sigma: f64) -> f64 {
    -(x - mean).powi(2) / (2.0 * sigma * sigma) - (sigma * (2.0 * std::f64::consts::PI).sqrt()).ln()
}

/// Marginalizes the telegraph likelihood over all `2^N` sign paths.
///
/// Returns `ln Σ_ζ P(ζ)·Π_k N(y_k; ζ_k, σ²)/N(y_k; 0, σ²) + N·A²/(2σ²)`,
/// the same normalization as [`rt_log_lrt`](super::rt_log_lrt).
pub fn rt_brute_force_log_lrt(
    y: &[f64],
    amplitude: f64,
    sigma: f64,
    p: f64,
    q: f64,
) -> Result<Statistic> {
    check_sigma(sigma)?;
    let n = y.len();
    if n == 0 {
        return Err(Error::EmptyInput("rt brute force"));
    }
    if n > RT_MAX_SAMPLES {
        return Err(Error::TooLarge(format!("N = {n} > {RT_MAX_SAMPLES}")));
    }
    let log_h0: f64 = y.iter().map(|&v| log_gaussian(v, 0.0, sigma)).sum();
    let log_terms: Vec<f64> = (0u32..1 << n)
        .map(|bits| {
            let up = |k: usize| bits >> k & 1 == 1;
            let mut log_prob = 0.5f64.ln();
            let mut log_lik = 0.0;
            for (k, &v) in y.iter().enumerate() {
                if k > 0 {
                    let stay = if up(k - 1) { p } else { q };
                    log_prob += if up(k) == up(k - 1) { stay } else { 1.0 - stay }.ln();
                }
                let mean = if up(k) { amplitude } else { -amplitude };
                log_lik += log_gaussian(v, mean, sigma);
            }
            log_prob + log_lik
        })
        .collect();
    let exact = log_sum_exp(&log_terms) - log_h0;
    Ok(Statistic::new(
        "rt-lrt",
        exact + n as f64 * amplitude * amplitude / (2.0 * sigma * sigma),
    ))
}

/// Marginalizes the random-walk likelihood over every path with nonzero
/// probability under `P`.
pub fn rw_brute_force_log_lrt(y: &[f64], model: &WalkModel, sigma: f64) -> Result<Statistic> {
    check_sigma(sigma)?;
    let n = y.len();
    if n == 0 {
        return Err(Error::EmptyInput("rw brute force"));
    }
    if n > RW_MAX_SAMPLES || model.half_states() > RW_MAX_HALF_STATES {
        return Err(Error::TooLarge(format!(
            "N = {n}, M = {} exceeds N ≤ {RW_MAX_SAMPLES}, M ≤ {RW_MAX_HALF_STATES}",
            model.half_states()
        )));
    }
    let transition = model.transition_matrix();
    let mut log_terms = Vec::new();
    // depth-first over (state, log-joint) pairs
    let m = model.half_states();
    let mut stack: Vec<(usize, usize, f64)> = [m - 1, m + 1]
        .into_iter()
        .map(|s| {
            (
                0,
                s,
                0.5f64.ln() + log_gaussian(y[0], model.state_value(s), sigma),
            )
        })
        .collect();
    while let Some((k, state, log_joint)) = stack.pop() {
        if k + 1 == n {
            log_terms.push(log_joint);
            continue;
        }
        for (next, &prob) in transition[state].iter().enumerate() {
            if prob > 0.0 {
                let ll = log_gaussian(y[k + 1], model.state_value(next), sigma);
                stack.push((k + 1, next, log_joint + prob.ln() + ll));
            }
        }
    }
    let log_h0: f64 = y.iter().map(|&v| log_gaussian(v, 0.0, sigma)).sum();
    Ok(Statistic::new("rw-lrt", log_sum_exp(&log_terms) - log_h0))
}
