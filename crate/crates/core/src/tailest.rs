//! Goldie–Smith tail-index estimators for the AR-coefficient law at the unit
//! root, their self-normalized confidence intervals and the one-sided
//! long-memory test of `H0: β ≥ 2`.

use crate::acf::{check_truncation, truncate_estimate};
use crate::error::{Error, Result};
use crate::special::normal_quantile;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Estimator on the true coefficients.
    Exact,
    /// Estimator on truncated lag-1 autocorrelations.
    Noisy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub beta_hat: f64,
    pub exceedances: usize,
    pub delta: f64,
    pub r: Option<f64>,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub z_stat: f64,
    pub omega: f64,
    pub critical: f64,
    pub reject_h0: bool,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

/// Exceedance count and summed log-excesses `ln(δ / (1 - a))` over `a > 1 - δ`.
///
/// The exceedance test is evaluated as `1 - a < δ`, so a threshold defined as
/// `δ = 1 - x` for an observed `x` excludes `x` itself without depending on
/// the rounding of `1 - (1 - x)`.
fn log_excess_sum(values: impl Iterator<Item = f64>, delta: f64) -> (usize, f64) {
    values
        .map(|a| 1.0 - a)
        .filter(|&u| u < delta)
        .fold((0, 0.0), |(k, s), u| (k + 1, s + (delta / u).ln()))
}

fn ratio(k: usize, denom: f64, delta: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::NoExceedances { delta });
    }
    if !(denom > 0.0 && denom.is_finite()) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(k as f64 / denom)
}

/// `β_N = K / Σ_{a_i > 1-δ} ln(δ / (1 - a_i))` on exact coefficients.
pub fn tail_index_gs(coeffs: &[f64], delta: f64) -> Result<EstimateResult> {
    check_delta(delta)?;
    let (k, denom) = log_excess_sum(coeffs.iter().copied(), delta);
    Ok(EstimateResult {
        beta_hat: ratio(k, denom, delta)?,
        exceedances: k,
        delta,
        r: None,
        method: Method::Exact,
    })
}

/// The same ratio on `ã_i = min(â_i, 1 - δ^r)`.
pub fn tail_index_noisy(a_hats: &[f64], delta: f64, r: f64) -> Result<EstimateResult> {
    check_truncation(delta, r)?;
    let truncated = a_hats
        .iter()
        .map(|&a| truncate_estimate(a, delta, r))
        .collect::<Result<Vec<_>>>()?;
    let (k, denom) = log_excess_sum(truncated.into_iter(), delta);
    Ok(EstimateResult {
        beta_hat: ratio(k, denom, delta)?,
        exceedances: k,
        delta,
        r: Some(r),
        method: Method::Noisy,
    })
}

/// Two-sided interval `β̂ ∓ z_{(1+level)/2} β̂ / √K`.
pub fn confidence_interval(est: &EstimateResult, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Parameter(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if est.exceedances == 0 {
        return Err(Error::NoExceedances { delta: est.delta });
    }
    let z = normal_quantile(0.5 * (1.0 + level));
    let half = z * est.beta_hat / (est.exceedances as f64).sqrt();
    Ok((est.beta_hat - half, est.beta_hat + half))
}

/// `Z = √K (β̂ - 2) / β̂`, rejecting `H0: β ≥ 2` when `Z < z(ω)`.
pub fn long_memory_test(est: &EstimateResult, omega: f64) -> Result<TestResult> {
    if !(omega > 0.0 && omega < 1.0) {
        return Err(Error::Parameter(format!(
            "omega must lie in (0, 1), got {omega}"
        )));
    }
    if est.exceedances == 0 {
        return Err(Error::NoExceedances { delta: est.delta });
    }
    if !(est.beta_hat > 0.0 && est.beta_hat.is_finite()) {
        return Err(Error::Parameter(format!(
            "beta_hat must be positive, got {}",
            est.beta_hat
        )));
    }
    let z_stat = (est.exceedances as f64).sqrt() * (est.beta_hat - 2.0) / est.beta_hat;
    let critical = normal_quantile(omega);
    Ok(TestResult {
        z_stat,
        omega,
        critical,
        reject_h0: z_stat < critical,
    })
}
