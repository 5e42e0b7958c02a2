//! Per-series lag-1 autocorrelation and the truncation applied before the
//! noisy tail-index estimator.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const DEGENERATE_SS: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisyCoefficient {
    pub series_index: usize,
    pub a_hat: f64,
    pub a_tilde: Option<f64>,
}

/// Sample lag-1 autocorrelation `Σ_{t<T} (X_t - X̄)(X_{t+1} - X̄) / Σ_t (X_t - X̄)²`.
pub fn lag1_autocorr(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 2 {
        return Err(Error::Parameter(format!(
            "series length must be >= 2, got {n}"
        )));
    }
    // two passes: the mean first, then centred sums
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut den = 0.0;
    let mut num = 0.0;
    let mut prev = series[0] - mean;
    den += prev * prev;
    for &x in &series[1..] {
        let d = x - mean;
        num += prev * d;
        den += d * d;
        prev = d;
    }
    if !(den >= DEGENERATE_SS) {
        return Err(Error::DegenerateSeries);
    }
    Ok((num / den).clamp(-1.0, 1.0))
}

/// `min(a_hat, 1 - δ^r)`.
pub fn truncate_estimate(a_hat: f64, delta: f64, r: f64) -> Result<f64> {
    check_truncation(delta, r)?;
    Ok(a_hat.min(1.0 - delta.powf(r)))
}

pub(crate) fn check_truncation(delta: f64, r: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::Parameter(format!(
            "truncation order r must be > 1, got {r}"
        )));
    }
    Ok(())
}

/// Lag-1 autocorrelations of every series, in series order.
pub fn noisy_coefficients<'a, I>(series: I) -> Result<Vec<NoisyCoefficient>>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    series
        .into_iter()
        .enumerate()
        .map(|(series_index, s)| {
            Ok(NoisyCoefficient {
                series_index,
                a_hat: lag1_autocorr(s)?,
                a_tilde: None,
            })
        })
        .collect()
}
