//! Low-SNR, long-record approximations of the telegraph log-LRT: the
//! symmetric second-order expansion, the quadratic-form view of the
//! filtered-energy detector, and the hybrid filtered-energy/amplitude/energy
//! statistic that matches the asymmetric expansion term by term.

use crate::classical::LowPassFilter;
use crate::error::{invalid, Error, Result};
use crate::signal_models::check_sigma;
use crate::statistic::Statistic;

/// Constants tying the hybrid statistic to the asymmetric expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridConstants {
    /// `r = p + q − 1`.
    pub r: f64,
    /// `C_m = (p − q)/(2 − p − q)`.
    pub c_m: f64,
    /// Amplitude-term weight `C_I = (p − q)σ²/(4q(1 − r)A)`.
    pub c_i: f64,
    /// Extra energy weight `C_II = r(1 − q)/(2q(1 − r))`.
    pub c_ii: f64,
    /// Overall scale `C = 4q(1 − q)(A/σ²)²/(1 − r)` of the expansion.
    pub scale_c: f64,
    /// `D = (1 − α²)/(2α)`, the scale of the filtered energy quadratic form.
    pub gain_d: f64,
    pub alpha: f64,
}

pub fn hybrid_constants(
    p: f64,
    q: f64,
    amplitude: f64,
    sigma: f64,
    alpha: f64,
) -> Result<HybridConstants> {
    for (name, v) in [("p", p), ("q", q)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(invalid(name, format!("must lie in (0, 1), got {v}")));
        }
    }
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(invalid("amplitude", "must be finite and > 0"));
    }
    check_sigma(sigma)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    let r = p + q - 1.0;
    let var = sigma * sigma;
    let snr_slope = amplitude / var;
    Ok(HybridConstants {
        r,
        c_m: (p - q) / (2.0 - p - q),
        c_i: (p - q) * var / (4.0 * q * (1.0 - r) * amplitude),
        c_ii: r * (1.0 - q) / (2.0 * q * (1.0 - r)),
        scale_c: 4.0 * q * (1.0 - q) * snr_slope * snr_slope / (1.0 - r),
        gain_d: (1.0 - alpha * alpha) / (2.0 * alpha),
        alpha,
    })
}

/// `Σ_k Σ_{j<k} ρ^{k−j}·y_j·y_k` in `O(N)` via `m_k = ρ·(m_{k−1} + y_{k−1})`.
pub fn cross_term_sum(y: &[f64], ratio: f64) -> f64 {
    let mut running = 0.0;
    let mut prev = 0.0;
    let mut total = 0.0;
    for &v in y {
        running = ratio * (running + prev);
        total += v * running;
        prev = v;
    }
    total
}

fn energy(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum()
}

/// `2p(A/σ²)²·[Σ_{j<k} (2p−1)^{k−j} y_j y_k + (1 − 1/(4p))·Σ y_k²]`.
pub fn symmetric_expansion_statistic(
    y: &[f64],
    p: f64,
    amplitude: f64,
    sigma: f64,
) -> Result<Statistic> {
    if y.is_empty() {
        return Err(Error::EmptyInput("symmetric expansion"));
    }
    check_sigma(sigma)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid("p", format!("must lie in (0, 1), got {p}")));
    }
    let slope = amplitude / (sigma * sigma);
    let value =
        2.0 * p * slope * slope * (cross_term_sum(y, 2.0 * p - 1.0) + (1.0 - 0.25 / p) * energy(y));
    Ok(Statistic::new("t1s", value))
}

/// `D·[Σ_{j<k} α^{k−j} y_j y_k + (α/(1+α))·Σ y_k²]`, the large-`N`
/// quadratic form of the filtered energy.
pub fn filtered_energy_closed_form(y: &[f64], alpha: f64) -> Result<Statistic> {
    if y.is_empty() {
        return Err(Error::EmptyInput("filtered energy closed form"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    let d = (1.0 - alpha * alpha) / (2.0 * alpha);
    let value = d * (cross_term_sum(y, alpha) + alpha / (1.0 + alpha) * energy(y));
    Ok(Statistic::new("t2", value))
}

/// `T_h = Σ a_k² + D·[C_I·Σ y_k + C_II·Σ y_k²]` with `a` the low-pass output.
pub fn hybrid_statistic(y: &[f64], constants: &HybridConstants, alpha: f64) -> Result<Statistic> {
    if y.is_empty() {
        return Err(Error::EmptyInput("hybrid statistic"));
    }
    if alpha != constants.alpha {
        return Err(invalid(
            "alpha",
            format!(
                "constants were built for α = {}, got {alpha}",
                constants.alpha
            ),
        ));
    }
    let filter = LowPassFilter::new(alpha)?;
    let (sum, sum_sq) = y.iter().fold((0.0, 0.0), |(s, s2), v| (s + v, s2 + v * v));
    let value = filter.output_energy(y)
        + constants.gain_d * (constants.c_i * sum + constants.c_ii * sum_sq);
    Ok(Statistic::new("hybrid", value))
}

/// `G = α(2p−1)/(1 − α(2p−1))`: the H1−H0 mean shift of the cross-term sum
/// is `≈ G·A²·(N−1)`.
pub fn cross_term_gain(alpha: f64, p: f64) -> Result<f64> {
    let prod = alpha * (2.0 * p - 1.0);
    if prod.is_nan() || prod >= 1.0 {
        return Err(invalid("alpha", format!("α(2p−1) must be < 1, got {prod}")));
    }
    Ok(prod / (1.0 - prod))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lrt::rt_log_lrt;
    use proptest::prelude::*;

    fn direct_cross(y: &[f64], ratio: f64) -> f64 {
        let mut total = 0.0;
        for k in 0..y.len() {
            for j in 0..k {
                total += ratio.powi((k - j) as i32) * y[j] * y[k];
            }
        }
        total
    }

    #[test]
    fn constants_symmetric_case() {
        let p = 0.9995;
        let c = hybrid_constants(p, p, 1.0, 10.0, 2.0 * p - 1.0).unwrap();
        assert_eq!(c.c_i, 0.0);
        assert_eq!(c.c_m, 0.0);
        assert!((c.c_ii - (2.0 * p - 1.0) / (4.0 * p)).abs() < 1e-14);
        assert!((c.c_ii - 0.24987).abs() < 1e-5);
    }

    #[test]
    fn constants_asymmetric_case() {
        let c = hybrid_constants(0.9998, 0.9992, 1.0, 1.0, 0.999).unwrap();
        assert!((c.c_m - 0.6).abs() < 1e-9);
        assert!((c.r - 0.999).abs() < 1e-12);
    }

    #[test]
    fn constants_reject_zero_alpha() {
        assert!(hybrid_constants(0.9, 0.9, 1.0, 1.0, 0.0).is_err());
        assert!(hybrid_constants(1.0, 0.9, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn half_plus_c_ii_identity() {
        for i in 1..100 {
            let p = 0.5 + 0.005 * i as f64;
            let c = hybrid_constants(p, p, 1.0, 1.0, 0.5).unwrap();
            assert!((0.5 + c.c_ii - (1.0 - 0.25 / p)).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_coefficient_gap_is_exact() {
        for i in 1..100 {
            let p = 0.5 + 0.005 * i as f64;
            let alpha = 2.0 * p - 1.0;
            let c = hybrid_constants(p, p, 1.0, 1.0, alpha).unwrap();
            let gap = (alpha / (1.0 + alpha) + c.c_ii - (1.0 - 0.25 / p)).abs();
            assert!((gap - (1.0 - alpha) / (2.0 * (1.0 + alpha))).abs() < 1e-12);
        }
    }

    #[test]
    fn single_sample_forms() {
        let (p, a, sigma, y0) = (0.8, 0.7, 1.2, 1.9);
        let t1s = symmetric_expansion_statistic(&[y0], p, a, sigma)
            .unwrap()
            .value;
        let slope = a / (sigma * sigma);
        assert!((t1s - 2.0 * p * slope * slope * (1.0 - 0.25 / p) * y0 * y0).abs() < 1e-14);
        let alpha = 0.6;
        let t2 = filtered_energy_closed_form(&[y0], alpha).unwrap().value;
        let d = (1.0 - alpha * alpha) / (2.0 * alpha);
        assert!((t2 - d * alpha / (1.0 + alpha) * y0 * y0).abs() < 1e-14);
    }

    #[test]
    fn half_p_kills_cross_terms() {
        let y = [0.3, -1.2, 2.0, 0.7];
        let t1s = symmetric_expansion_statistic(&y, 0.5, 1.0, 1.0)
            .unwrap()
            .value;
        let energy: f64 = y.iter().map(|v| v * v).sum();
        assert!((t1s - 2.0 * 0.5 * 0.5 * energy).abs() < 1e-14);
    }

    #[test]
    fn recursive_cross_sums_match_direct() {
        let y: Vec<f64> = (0..100)
            .map(|i| ((i * 7919 % 211) as f64 / 60.0) - 1.7)
            .collect();
        let (p, a, sigma) = (0.93, 0.4, 1.5);
        let slope = a / (sigma * sigma);
        let direct_t1s = 2.0
            * p
            * slope
            * slope
            * (direct_cross(&y, 2.0 * p - 1.0) + (1.0 - 0.25 / p) * energy(&y));
        let t1s = symmetric_expansion_statistic(&y, p, a, sigma)
            .unwrap()
            .value;
        assert!((t1s - direct_t1s).abs() <= 1e-10 * direct_t1s.abs());

        let alpha = 0.87;
        let d = (1.0 - alpha * alpha) / (2.0 * alpha);
        let direct_t2 = d * (direct_cross(&y, alpha) + alpha / (1.0 + alpha) * energy(&y));
        let t2 = filtered_energy_closed_form(&y, alpha).unwrap().value;
        assert!((t2 - direct_t2).abs() <= 1e-10 * direct_t2.abs());
    }

    #[test]
    fn hybrid_reduces_for_symmetric_case() {
        let p = 0.95;
        let alpha = 2.0 * p - 1.0;
        let c = hybrid_constants(p, p, 1.0, 3.0, alpha).unwrap();
        let y: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let filt = LowPassFilter::new(alpha).unwrap().output_energy(&y);
        let h = hybrid_statistic(&y, &c, alpha).unwrap().value;
        assert!((h - (filt + c.gain_d * c.c_ii * energy(&y))).abs() < 1e-12);
        assert_eq!(hybrid_statistic(&[0.0; 10], &c, alpha).unwrap().value, 0.0);
        assert!(hybrid_statistic(&y, &c, 0.5).is_err());
    }

    #[test]
    fn hybrid_term_by_term_assembly() {
        let (p, q, a) = (0.9998, 0.9992, 1.0);
        let sigma = 10f64.powf(45.0 / 20.0);
        let alpha = 2.0 * 0.9995 - 1.0;
        let c = hybrid_constants(p, q, a, sigma, alpha).unwrap();
        let y: Vec<f64> = (0..2000)
            .map(|i| sigma * ((i * 31 % 97) as f64 / 48.0 - 1.0))
            .collect();
        let h = hybrid_statistic(&y, &c, alpha).unwrap().value;
        let f = LowPassFilter::new(alpha).unwrap();
        let fe = crate::classical::energy_statistic(&y, Some(&f))
            .unwrap()
            .value;
        let amp = crate::classical::amplitude_statistic(&y).unwrap().value;
        let en = crate::classical::energy_statistic(&y, None).unwrap().value;
        let mean_sign = y.iter().sum::<f64>().signum();
        let assembled = fe + c.gain_d * (c.c_i * mean_sign * amp * y.len() as f64 + c.c_ii * en);
        assert!((h - assembled).abs() <= 1e-10 * h.abs());
    }

    #[test]
    fn gain_values() {
        let p = 0.9995;
        let alpha = 2.0 * p - 1.0;
        let g = cross_term_gain(alpha, p).unwrap();
        let closed = 1.0 / (4.0 * (1.0 - p)) + 1.0 / (4.0 * p) - 1.0;
        assert!((g - closed).abs() < 1e-9);
        assert!((g - 499.25).abs() < 0.01);
        assert_eq!(cross_term_gain(0.9, 0.5).unwrap(), 0.0);
        assert!(cross_term_gain(1.0, 1.0).is_err());
    }

    /// First-order coefficient of the telegraph log-LRT in `y_k`, taken by
    /// central differences at `y = 0`, equals `(A/σ²)·C_m·(1 − r^k)`.
    #[test]
    fn first_order_coefficient_spot_check() {
        let (p, q, a, sigma) = (0.9, 0.7, 0.8, 1.1);
        let n = 12;
        let r: f64 = p + q - 1.0;
        let c_m = (p - q) / (2.0 - p - q);
        let h = 1e-5;
        for k in 0..n {
            let mut plus = vec![0.0; n];
            let mut minus = vec![0.0; n];
            plus[k] = h;
            minus[k] = -h;
            let deriv = (rt_log_lrt(&plus, a, sigma, p, q).unwrap().value
                - rt_log_lrt(&minus, a, sigma, p, q).unwrap().value)
                / (2.0 * h);
            let expected = a / (sigma * sigma) * c_m * (1.0 - r.powi(k as i32));
            assert!(
                (deriv - expected).abs() < 1e-7,
                "k={k}: {deriv} vs {expected}"
            );
        }
    }

    proptest! {
        #[test]
        fn t2_is_quadratic(y in prop::collection::vec(-5.0f64..5.0, 1..80), c in -4.0f64..4.0, alpha in 0.05f64..0.99) {
            let base = filtered_energy_closed_form(&y, alpha).unwrap().value;
            let scaled: Vec<f64> = y.iter().map(|v| c * v).collect();
            let s = filtered_energy_closed_form(&scaled, alpha).unwrap().value;
            prop_assert!((s - c * c * base).abs() <= 1e-10 * (c * c * base).abs().max(1e-12));
        }

        #[test]
        fn recursion_equals_quadratic_form(y in prop::collection::vec(-5.0f64..5.0, 1..200), ratio in -0.99f64..0.99) {
            let fast = cross_term_sum(&y, ratio);
            let slow = direct_cross(&y, ratio);
            let scale: f64 = y.iter().map(|v| v * v).sum::<f64>().max(1e-12);
            prop_assert!((fast - slow).abs() <= 1e-10 * scale);
        }
    }
}
