//! Monte-Carlo trials, empirical Neyman-Pearson thresholds, ROC and power
//! curves.

mod curves;
mod detectors;
mod trials;

pub use curves::{
    auc, auc_std_error, compare_auc, default_pf_grid, detection_probability, empirical_threshold,
    mann_whitney_auc, power_curve, roc_curve, AucComparison, CurveKind, CurveTable,
};
pub use detectors::{
    needs_surrogate, telegraph_surrogate, DetectorBank, DetectorKind, DetectorSet,
    TelegraphSurrogate,
};
pub use trials::{run_trials, Fingerprint, TrialBatch};
