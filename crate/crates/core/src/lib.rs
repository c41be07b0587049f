//! Discrete-time spin-detection toolkit.
//!
//! Signal generators for the two-state random telegraph and the reflecting
//! random walk, the classical detectors (amplitude, energy, filtered energy,
//! omniscient matched filter), the exact likelihood-ratio tests for both
//! models, their low-SNR quadratic approximations, and a Monte-Carlo harness
//! that turns detector statistics into ROC and power curves.

pub mod approx;
pub mod classical;
pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod harness;
pub mod lrt;
pub mod presets;
pub mod rng;
pub mod signal_models;
mod statistic;

pub use error::{Error, Result};
pub use statistic::Statistic;
