//! Bundled experiment configurations `fig5` through `fig12`.

use crate::config::ExperimentConfig;
use crate::signal_models::physical_amplitude;

const TELEGRAPH_DETECTORS: &str = "mf, rt-lrt, filtered-energy, hybrid, amplitude, energy";
const WALK_DETECTORS: &str = "mf, rw-lrt, rt-lrt, filtered-energy, hybrid, amplitude, energy";

/// Frequency-shift amplitude for `k = 1e-3 N/m`, `ω₀ = 2π·1e4 rad/s`,
/// `B₁ = 0.2 mT`, `G = 2e6 T/m` and `|μ| = 9.28e-24 J/T`.
pub fn cantilever_amplitude() -> f64 {
    physical_amplitude(1e-3, 2.0 * std::f64::consts::PI * 1e4, 2e-4, 2e6, 9.28e-24)
}

const SYMMETRIC_POWER_GRID: &str =
    "-50, -47.5, -45, -42.5, -40, -37.5, -35, -32.5, -30, -27.5, -25, -22.5, -20";
const ASYMMETRIC_POWER_GRID: &str = "-55, -52.5, -50, -47.5, -45, -42.5, -40, -37.5, -35";

/// Number of half-range walk states used by the walk presets.
pub const WALK_HALF_STATES: usize = 40;

pub const PRESET_NAMES: [&str; 8] = [
    "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12",
];

fn telegraph(
    transitions: &str,
    duration: u32,
    noise: &str,
    extra: &str,
    detectors: &str,
) -> String {
    format!(
        "model.type = telegraph\nmodel.amplitude = {}\n{transitions}\n{noise}\n\
         run.duration = {duration}\nrun.ts = 0.001\nrun.trials = 2000\nrun.seed = 1\nrun.pf = 0.1\n{extra}\
         detectors.list = {detectors}\ndetectors.alpha = auto\n",
        cantilever_amplitude()
    )
}

fn walk(k1: f64, k2: f64, h1: f64, h2: f64, snr_db: f64) -> String {
    format!(
        "model.type = walk\nmodel.m = {WALK_HALF_STATES}\nmodel.amplitude = {}\n\
         model.k1 = {k1}\nmodel.k2 = {k2}\nmodel.h1 = {h1}\nmodel.h2 = {h2}\nnoise.snr_db = {snr_db}\n\
         run.duration = 60\nrun.ts = 0.001\nrun.trials = 2000\nrun.seed = 1\nrun.pf = 0.1\n\
         detectors.list = {WALK_DETECTORS}\ndetectors.alpha = auto\ndetectors.fit_paths = 200\n",
        cantilever_amplitude()
    )
}

pub fn preset_text(name: &str) -> Option<String> {
    let sym = "model.lambda = 0.5";
    let asym = "model.p = 0.9998\nmodel.q = 0.9992";
    let grid = |g: &str| format!("run.snr_grid = {g}\n");
    Some(match name {
        "fig5" => telegraph(sym, 60, "noise.snr_db = -35", "", TELEGRAPH_DETECTORS),
        "fig6" => telegraph(
            sym,
            60,
            "",
            &grid(SYMMETRIC_POWER_GRID),
            TELEGRAPH_DETECTORS,
        ),
        "fig7" => telegraph(
            sym,
            150,
            "",
            &grid(SYMMETRIC_POWER_GRID),
            TELEGRAPH_DETECTORS,
        ),
        "fig8" => telegraph(asym, 150, "noise.snr_db = -45", "", TELEGRAPH_DETECTORS),
        "fig9" => telegraph(
            asym,
            150,
            "",
            &grid(ASYMMETRIC_POWER_GRID),
            TELEGRAPH_DETECTORS,
        ),
        "fig10" => walk(0.5, 0.5, 0.5, 0.5, -39.9),
        "fig11" => walk(0.52, 0.48, 0.48, 0.52, -37.4),
        "fig12" => walk(0.45, 0.55, 0.45, 0.55, -41.0),
        _ => return None,
    })
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    preset_text(name).map(|t| ExperimentConfig::parse(&t).expect("bundled preset parses"))
}
