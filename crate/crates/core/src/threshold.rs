//! Data-driven threshold selection.
//!
//! The coefficients are mapped to `Y = 1/(1-a)`, whose tail is regularly
//! varying with index β. Second-order parameters `(ρ, B)` of that tail are
//! estimated semiparametrically from log-excesses of the top order statistics:
//!
//! * ρ̂ by the moment-ratio statistic `T^(τ)(k)` built from
//!   `M_j(k) = k⁻¹ Σ_{i≤k} (ln Y_(n-i+1) - ln Y_(n-k))^j`, `j = 1, 2, 3`,
//!   with `ρ̂_τ(k) = -|3(T-1)/(T-3)|`. The tuning `τ ∈ {0, 1}` is the one whose
//!   path `k ↦ ρ̂_τ(k)` is most stable over `k ∈ [⌊n^0.9⌋, ⌊n^0.995⌋]`
//!   (smallest squared deviation from its median; ties go to `τ = 0`), and ρ̂ is
//!   read off at `k_ρ = ⌊n^0.995⌋`.
//! * B̂ from the scaled log-spacings `U_i = i (ln Y_(n-i+1) - ln Y_(n-i))`.
//!
//! B̂ follows the sign convention of the Hill-bias literature, so it is
//! positive when the Hill estimator of `1/β` is biased upward. The optimal
//! level only depends on `B²`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const MIN_SAMPLE: usize = 100;
const K_LOW_EXP: f64 = 0.90;
const K_HIGH_EXP: f64 = 0.995;
const RHO_MIN: f64 = -5.0;
const RHO_MAX: f64 = -0.01;
const K_STAR_MIN: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderFit {
    pub rho_hat: f64,
    pub b_hat: f64,
    pub tau_choice: u8,
    pub k_rho: usize,
    pub n: usize,
    /// Inputs ≥ 1 (or NaN) left out of the Y-transform.
    pub excluded: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdChoice {
    pub delta: f64,
    /// k* after clamping to `[5, n/2]`.
    pub k_star: f64,
    pub epsilon: f64,
    /// Number of top order statistics above the threshold, `⌊(k*)^ε⌋`.
    pub sample_fraction: usize,
    /// 1-based index `n - m` of the order statistic defining δ.
    pub used_order_stat_index: usize,
    pub fit: SecondOrderFit,
}

/// `ln Y = -ln(1 - a)` for the usable inputs, sorted descending.
fn log_y_descending(coeffs: &[f64]) -> (Vec<f64>, usize) {
    let mut ly: Vec<f64> = coeffs
        .iter()
        .filter(|&&a| a < 1.0)
        .map(|&a| -(-a).ln_1p())
        .collect();
    let excluded = coeffs.len() - ly.len();
    ly.sort_by(|a, b| b.total_cmp(a));
    (ly, excluded)
}

/// `M_1, M_2, M_3` at every `k` in `ks`, from shifted prefix sums.
fn log_excess_moments(ly: &[f64], ks: std::ops::RangeInclusive<usize>) -> Vec<[f64; 3]> {
    let kmax = *ks.end();
    let shift = ly[kmax];
    let mut s = [0.0f64; 3];
    let mut prefix = Vec::with_capacity(kmax + 1);
    prefix.push(s);
    for &v in &ly[..kmax] {
        let x = v - shift;
        s[0] += x;
        s[1] += x * x;
        s[2] += x * x * x;
        prefix.push(s);
    }
    ks.map(|k| {
        let [s1, s2, s3] = prefix[k];
        let c = ly[k] - shift;
        let kf = k as f64;
        let m1 = (s1 - kf * c) / kf;
        let m2 = (s2 - 2.0 * c * s1 + kf * c * c) / kf;
        let m3 = (s3 - 3.0 * c * s2 + 3.0 * c * c * s1 - kf * c * c * c) / kf;
        [m1, m2.max(0.0), m3.max(0.0)]
    })
    .collect()
}

fn rho_from_moments([m1, m2, m3]: [f64; 3], tau: u8) -> f64 {
    let (a, b, c) = (m1, m2 / 2.0, m3 / 6.0);
    let t = if tau == 0 {
        (a.ln() - b.ln() / 2.0) / (b.ln() / 2.0 - c.ln() / 3.0)
    } else {
        (a - b.sqrt()) / (b.sqrt() - c.cbrt())
    };
    -(3.0 * (t - 1.0) / (t - 3.0)).abs()
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn stability(path: &[f64]) -> Option<f64> {
    let finite: Vec<f64> = path.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return None;
    }
    let med = median(&finite);
    Some(finite.iter().map(|v| (v - med) * (v - med)).sum())
}

/// Scale estimate B̂ at level k given ρ̂.
fn b_from_spacings(ly: &[f64], k: usize, n: usize, rho: f64) -> f64 {
    let kf = k as f64;
    let (mut d_rho, mut big_d0, mut big_d_rho, mut big_d_2rho) = (0.0, 0.0, 0.0, 0.0);
    for i in 1..=k {
        let w = (i as f64 / kf).powf(-rho);
        let u = i as f64 * (ly[i - 1] - ly[i]);
        d_rho += w;
        big_d0 += u;
        big_d_rho += w * u;
        big_d_2rho += w * w * u;
    }
    let (d_rho, big_d0, big_d_rho, big_d_2rho) =
        (d_rho / kf, big_d0 / kf, big_d_rho / kf, big_d_2rho / kf);
    (kf / n as f64).powf(rho) * (d_rho * big_d0 - big_d_rho) / (d_rho * big_d_rho - big_d_2rho)
}

pub fn estimate_second_order(coeffs: &[f64]) -> Result<SecondOrderFit> {
    let (ly, excluded) = log_y_descending(coeffs);
    let n = ly.len();
    if n < MIN_SAMPLE {
        return Err(Error::SampleSize {
            need: MIN_SAMPLE,
            got: n,
        });
    }
    let nf = n as f64;
    let k_hi = (nf.powf(K_HIGH_EXP).floor() as usize).min(n - 1);
    let k_lo = (nf.powf(K_LOW_EXP).floor() as usize).clamp(1, k_hi);
    if ly[0] - ly[k_hi] <= 0.0 {
        return Err(Error::Degenerate(
            "top order statistics are all equal".into(),
        ));
    }
    let moments = log_excess_moments(&ly, k_lo..=k_hi);

    let mut best: Option<(u8, f64, f64)> = None;
    for tau in [0u8, 1] {
        let path: Vec<f64> = moments.iter().map(|&m| rho_from_moments(m, tau)).collect();
        let at_k_rho = *path.last().expect("non-empty range");
        let Some(score) = stability(&path) else {
            continue;
        };
        if !at_k_rho.is_finite() {
            continue;
        }
        // strict comparison keeps τ = 0 on ties
        if best.is_none_or(|(_, s, _)| score < s) {
            best = Some((tau, score, at_k_rho));
        }
    }
    let (tau_choice, _, rho_raw) = best
        .ok_or_else(|| Error::Degenerate("log-excess moments give no finite ρ estimate".into()))?;
    let rho_hat = rho_raw.clamp(RHO_MIN, RHO_MAX);
    let b_hat = b_from_spacings(&ly, k_hi, n, rho_hat);
    if !b_hat.is_finite() || b_hat == 0.0 {
        return Err(Error::Degenerate(format!("scale estimate B̂ = {b_hat}")));
    }
    Ok(SecondOrderFit {
        rho_hat,
        b_hat,
        tau_choice,
        k_rho: k_hi,
        n,
        excluded,
    })
}

/// `k* = ((1-ρ) n^{-ρ} / (B √(-2ρ)))^{2/(1-2ρ)}`, evaluated through `B²`.
pub fn k_star(n: usize, fit: &SecondOrderFit) -> Result<f64> {
    k_star_raw(n, fit.rho_hat, fit.b_hat)
}

pub fn k_star_raw(n: usize, rho: f64, b: f64) -> Result<f64> {
    if !(rho < 0.0) || b == 0.0 || !b.is_finite() {
        return Err(Error::Parameter(format!(
            "k* needs ρ < 0 and B ≠ 0, got ρ={rho}, B={b}"
        )));
    }
    let nf = n as f64;
    let base = (1.0 - rho).powi(2) * nf.powf(-2.0 * rho) / (-2.0 * rho * b * b);
    let k = base.powf(1.0 / (1.0 - 2.0 * rho));
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Numeric(format!("k* = {k}")));
    }
    Ok(k)
}

/// δ = 1 - x_(n-m) for ascending order statistics `x_(1) ≤ … ≤ x_(n)`.
/// Returns δ and the 1-based index `n - m`.
pub fn delta_for_fraction(values: &[f64], m: usize) -> Result<(f64, usize)> {
    let n = values.len();
    if m < 1 || m >= n {
        return Err(Error::Threshold(format!(
            "sample fraction {m} outside [1, {}]",
            n.saturating_sub(1)
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let idx = n - m;
    let delta = 1.0 - sorted[idx - 1];
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Threshold(format!(
            "order statistic {idx} = {} gives δ = {delta} outside (0, 1)",
            sorted[idx - 1]
        )));
    }
    Ok((delta, idx))
}

/// `⌊(k*)^ε⌋` clamped to `[1, n-1]`.
pub fn sample_fraction(k_star: f64, epsilon: f64, n: usize) -> usize {
    (k_star.powf(epsilon).floor() as usize).clamp(1, n.saturating_sub(1).max(1))
}

/// Adaptive threshold: fit (ρ̂, B̂), clamp k* to `[5, n/2]`, keep the top
/// `⌊(k*)^ε⌋` order statistics.
pub fn adaptive_delta(coeffs: &[f64], epsilon: f64) -> Result<ThresholdChoice> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Parameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    let n = coeffs.len();
    if n < MIN_SAMPLE {
        return Err(Error::SampleSize {
            need: MIN_SAMPLE,
            got: n,
        });
    }
    let fit = estimate_second_order(coeffs)?;
    let raw = k_star(fit.n, &fit)?;
    let k = raw.clamp(K_STAR_MIN, n as f64 / 2.0);
    let m = sample_fraction(k, epsilon, n);
    let (delta, idx) = delta_for_fraction(coeffs, m)?;
    Ok(ThresholdChoice {
        delta,
        k_star: k,
        epsilon,
        sample_fraction: m,
        used_order_stat_index: idx,
        fit,
    })
}

/// AMSE-optimal threshold `(β(β+ν)² / (2τ²ν³κn))^{1/(β+2ν)}`.
pub fn delta_star(beta: f64, nu: f64, tau: f64, kappa: f64, n: usize) -> Result<f64> {
    if tau == 0.0 || !tau.is_finite() {
        return Err(Error::Parameter("δ* is undefined for τ = 0".into()));
    }
    if !(beta > 1.0 && nu > 0.0 && kappa > 0.0 && n > 0) {
        return Err(Error::Parameter(format!(
            "δ* needs β > 1, ν > 0, κ > 0, n ≥ 1 (β={beta}, ν={nu}, κ={kappa}, n={n})"
        )));
    }
    let num = beta * (beta + nu).powi(2);
    let den = 2.0 * tau * tau * nu.powi(3) * kappa * n as f64;
    Ok((num / den).powf(1.0 / (beta + 2.0 * nu)))
}
