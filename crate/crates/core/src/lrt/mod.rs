//! Exact likelihood-ratio tests for the telegraph and random-walk models.
//!
//! Both detectors run the forward (predictive) recursion of a hidden Markov
//! model and accumulate the log-likelihood ratio one sample at a time. Each
//! step's weights are shifted by their maximum exponent before they are
//! exponentiated, so arbitrarily long records at low SNR do not underflow.
//!
//! Walk states use zero-based indexing: index `i` is the signal value
//! `(i − M)·s`, so the zero state sits at index `M`.

mod brute;
mod telegraph;
mod walk;

pub use brute::{rt_brute_force_log_lrt, rw_brute_force_log_lrt};
pub use telegraph::{rt_log_lrt, rt_posterior_step, TelegraphLrt, TelegraphPosterior};
pub use walk::{rw_log_lrt, rw_posterior_step, WalkLrt, WalkPosterior};

/// `ln(Σ exp(v))` over a non-empty slice.
pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
