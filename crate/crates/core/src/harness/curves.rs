use std::fmt;

use super::detectors::{needs_surrogate, telegraph_surrogate, DetectorSet};
use super::trials::{run_with_surrogate, TrialBatch};
use crate::error::{invalid, Error, Result};
use crate::signal_models::SignalModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Roc,
    Power,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::Roc => "ROC",
            CurveKind::Power => "POWER",
        })
    }
}

/// One detector's curve: `(P_F, P_D)` for ROC, `(SNR_dB, P_D)` for power.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub kind: CurveKind,
    pub detector: String,
    pub points: Vec<(f64, f64)>,
    pub metadata: Vec<(String, String)>,
}

/// 50 log-spaced values on `[0.005, 0.5]`, then a linear fill in steps of
/// 0.025 up to 0.975 and a final 0.99.
pub fn default_pf_grid() -> Vec<f64> {
    let (lo, hi) = (0.005f64.ln(), 0.5f64.ln());
    let mut grid: Vec<f64> = (0..50)
        .map(|i| (lo + (hi - lo) * i as f64 / 49.0).exp())
        .collect();
    grid[0] = 0.005;
    grid[49] = 0.5;
    grid.extend((1..=19).map(|i| 0.5 + 0.025 * i as f64));
    grid.push(0.99);
    grid
}

fn check_pf(pf: f64) -> Result<()> {
    if !(pf > 0.0 && pf < 1.0) {
        return Err(invalid("pf", format!("must lie in (0, 1), got {pf}")));
    }
    Ok(())
}

/// Index `k − 1` of the `k = ⌈n(1 − pf)⌉`-th smallest value.
fn threshold_rank(n: usize, pf: f64) -> Result<usize> {
    check_pf(pf)?;
    if (n as f64) * pf < 1.0 - 1e-9 {
        return Err(Error::TooFewTrials { trials: n, pf });
    }
    let k = ((n as f64) * (1.0 - pf) - 1e-9).ceil().max(1.0) as usize;
    Ok(k - 1)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Fraction of `sorted_stats` strictly above `eta`.
fn exceed_fraction(sorted_stats: &[f64], eta: f64) -> f64 {
    let at_or_below = sorted_stats.partition_point(|&v| v <= eta);
    (sorted_stats.len() - at_or_below) as f64 / sorted_stats.len() as f64
}

/// `η` = the `⌈n(1 − pf)⌉`-th smallest H0 statistic; deciding H1 on
/// `statistic > η` then has empirical false-alarm rate at most `pf`.
pub fn empirical_threshold(h0_stats: &[f64], pf: f64) -> Result<f64> {
    if h0_stats.is_empty() {
        return Err(Error::EmptyInput("H0 statistics"));
    }
    let rank = threshold_rank(h0_stats.len(), pf)?;
    Ok(sorted(h0_stats)[rank])
}

/// Empirical detection probability at false-alarm level `pf`.
pub fn detection_probability(batch: &TrialBatch, pf: f64) -> Result<f64> {
    let eta = empirical_threshold(&batch.h0_stats, pf)?;
    Ok(batch.h1_stats.iter().filter(|&&v| v > eta).count() as f64 / batch.n_trials() as f64)
}

fn batch_metadata(batch: &TrialBatch) -> Vec<(String, String)> {
    let fp = &batch.fingerprint;
    vec![
        ("detector".into(), batch.detector.clone()),
        ("n_trials".into(), batch.n_trials().to_string()),
        ("N".into(), fp.n_samples.to_string()),
        ("sigma".into(), fp.sigma.to_string()),
        ("seed".into(), fp.master_seed.to_string()),
    ]
}

pub fn roc_curve(batch: &TrialBatch, grid: &[f64]) -> Result<CurveTable> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("pf grid"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("pf grid", "must be strictly increasing"));
    }
    let h0 = sorted(&batch.h0_stats);
    let h1 = sorted(&batch.h1_stats);
    let mut points = Vec::with_capacity(grid.len());
    let mut floor = 0.0f64;
    for &pf in grid {
        let eta = h0[threshold_rank(h0.len(), pf)?];
        floor = floor.max(exceed_fraction(&h1, eta));
        points.push((pf, floor));
    }
    debug_assert!(points.windows(2).all(|w| w[1].1 >= w[0].1));
    Ok(CurveTable {
        kind: CurveKind::Roc,
        detector: batch.detector.clone(),
        points,
        metadata: batch_metadata(batch),
    })
}

/// Trapezoidal area under a ROC curve closed with `(0, 0)` and `(1, 1)`.
pub fn auc(curve: &CurveTable) -> Result<f64> {
    if curve.kind != CurveKind::Roc {
        return Err(Error::WrongCurveKind { expected: "ROC" });
    }
    let mut area = 0.0;
    let mut prev = (0.0, 0.0);
    for &pt in curve.points.iter().chain(std::iter::once(&(1.0, 1.0))) {
        area += (pt.0 - prev.0) * (pt.1 + prev.1) / 2.0;
        prev = pt;
    }
    Ok(area)
}

/// `P(X1 > X0) + ½·P(X1 = X0)` over all H0/H1 pairs.
pub fn mann_whitney_auc(batch: &TrialBatch) -> f64 {
    placements(batch).0.iter().sum::<f64>() / batch.n_trials() as f64
}

/// Per-H1 and per-H0 placement values.
fn placements(batch: &TrialBatch) -> (Vec<f64>, Vec<f64>) {
    let h0 = sorted(&batch.h0_stats);
    let h1 = sorted(&batch.h1_stats);
    let place = |v: f64, other: &[f64], below: bool| {
        let lt = other.partition_point(|&o| o < v);
        let le = other.partition_point(|&o| o <= v);
        let strictly = if below { lt } else { other.len() - le };
        (strictly as f64 + 0.5 * (le - lt) as f64) / other.len() as f64
    };
    let v10 = batch
        .h1_stats
        .iter()
        .map(|&y| place(y, &h0, true))
        .collect();
    let v01 = batch
        .h0_stats
        .iter()
        .map(|&x| place(x, &h1, false))
        .collect();
    (v10, v01)
}

fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (n - 1.0)
}

/// Two detectors' AUCs from the same trials and the DeLong standard error of
/// their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucComparison {
    pub auc_a: f64,
    pub auc_b: f64,
    pub difference: f64,
    pub std_error: f64,
}

pub fn compare_auc(a: &TrialBatch, b: &TrialBatch) -> Result<AucComparison> {
    if a.fingerprint != b.fingerprint {
        return Err(invalid(
            "batches",
            "paired comparison needs batches from the same run",
        ));
    }
    if a.n_trials() < 2 {
        return Err(Error::TooFewTrials {
            trials: a.n_trials(),
            pf: 0.5,
        });
    }
    let (a10, a01) = placements(a);
    let (b10, b01) = placements(b);
    let n = a.n_trials() as f64;
    let var = |x: &[f64], y: &[f64]| covariance(x, x) + covariance(y, y) - 2.0 * covariance(x, y);
    let variance = var(&a10, &b10) / n + var(&a01, &b01) / n;
    let auc_a = a10.iter().sum::<f64>() / n;
    let auc_b = b10.iter().sum::<f64>() / n;
    Ok(AucComparison {
        auc_a,
        auc_b,
        difference: auc_a - auc_b,
        std_error: variance.max(0.0).sqrt(),
    })
}

/// DeLong standard error of one detector's AUC.
pub fn auc_std_error(batch: &TrialBatch) -> f64 {
    let (v10, v01) = placements(batch);
    let n = batch.n_trials() as f64;
    ((covariance(&v10, &v10) + covariance(&v01, &v01)) / n)
        .max(0.0)
        .sqrt()
}

/// `P_D` at fixed `pf` against SNR, one curve per detector. `A` stays fixed
/// and `σ` follows the SNR; every SNR point reuses the same per-trial seeds.
pub fn power_curve(
    model: &SignalModel,
    set: &DetectorSet,
    snr_grid_db: &[f64],
    pf: f64,
    n_trials: usize,
    master_seed: u64,
) -> Result<Vec<CurveTable>> {
    set.validate()?;
    if snr_grid_db.is_empty() {
        return Err(Error::EmptyInput("SNR grid"));
    }
    if snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("snr grid", "must be strictly increasing"));
    }
    threshold_rank(n_trials, pf)?;
    let surrogate = if needs_surrogate(&set.kinds) {
        Some(telegraph_surrogate(model, set, master_seed)?)
    } else {
        None
    };
    let mut curves: Vec<CurveTable> = set
        .kinds
        .iter()
        .map(|k| CurveTable {
            kind: CurveKind::Power,
            detector: k.name().to_string(),
            points: Vec::with_capacity(snr_grid_db.len()),
            metadata: vec![
                ("detector".into(), k.name().to_string()),
                ("n_trials".into(), n_trials.to_string()),
                ("N".into(), model.n_samples().to_string()),
                ("pf".into(), pf.to_string()),
                ("seed".into(), master_seed.to_string()),
            ],
        })
        .collect();
    for &snr in snr_grid_db {
        let sigma = model.sigma_for_snr_db(snr)?;
        let batches =
            run_with_surrogate(model, set, surrogate.as_ref(), n_trials, sigma, master_seed)?;
        for (curve, batch) in curves.iter_mut().zip(&batches) {
            curve.points.push((snr, detection_probability(batch, pf)?));
        }
    }
    Ok(curves)
}
