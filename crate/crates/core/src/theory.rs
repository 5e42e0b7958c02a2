//! Closed-form quantities of the beta-type coefficient law.
//!
//! Tail expansion. With `u = 1 - x` the density is
//! `g(1-u) = (2^β / B(α,β)) u^{β-1} (1 - c u + O(u²))`, `c = (2α-1) + (β-1)/2`,
//! because `x^{2α-1} = 1 - (2α-1)u + O(u²)` and `1 - x² = 2u(1 - u/2)`.
//! Integrating over `(0, x)`:
//! `P(a > 1-x) = κ x^β (1 + τ x + O(x²))` with `κ = 2^β / (β B(α,β))`,
//! `τ = -cβ/(β+1)` and `ν = 1`. The first-order term vanishes when `c = 0`,
//! i.e. `4α + β = 3`, which is rejected.

use crate::error::{Error, Result};
use crate::model::CoefficientLaw;
use crate::quad::{self, QuadOptions};
use crate::special::{ln_beta, ln_gamma};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    pub kappa: f64,
    pub nu: f64,
    pub tau: f64,
    /// `-ν/β`
    pub rho: f64,
    /// `(ν/β) κ^{-ν/β} τ`
    pub b_const: f64,
    /// `κβ`, the leading constant of the density at 1
    pub g1: f64,
}

pub fn beta_model_constants(alpha: f64, beta: f64) -> Result<TailConstants> {
    CoefficientLaw::new(alpha, beta)?;
    if (4.0 * alpha + beta - 3.0).abs() < 1e-12 {
        return Err(Error::Parameter(format!(
            "4α + β = 3 (α={alpha}, β={beta}): the first-order tail correction vanishes and ν ≠ 1"
        )));
    }
    let kappa = (beta * std::f64::consts::LN_2 - ln_beta(alpha, beta)).exp() / beta;
    let nu = 1.0;
    let c = (2.0 * alpha - 1.0) + (beta - 1.0) / 2.0;
    let tau = -c * beta / (beta + 1.0);
    let rho = -nu / beta;
    let b_const = (nu / beta) * kappa.powf(-nu / beta) * tau;
    Ok(TailConstants {
        kappa,
        nu,
        tau,
        rho,
        b_const,
        g1: kappa * beta,
    })
}

/// `E[a^t / (1 - a²)] = B(α + t/2, β - 1) / B(α, β)`.
pub fn autocovariance(alpha: f64, beta: f64, t: u64) -> Result<f64> {
    CoefficientLaw::new(alpha, beta)?;
    let half = t as f64 / 2.0;
    Ok((ln_beta(alpha + half, beta - 1.0) - ln_beta(alpha, beta)).exp())
}

/// Leading constant `C` in `autocovariance(t) ~ C t^{-(β-1)}`: `C = κβΓ(β-1)/2`.
pub fn autocovariance_tail_constant(alpha: f64, beta: f64) -> Result<f64> {
    let tc = beta_model_constants(alpha, beta)?;
    Ok(tc.g1 * ln_gamma(beta - 1.0).exp() / 2.0)
}

const SPLIT_NEAR_ONE: f64 = 1e-6;

/// `f(λ) = (2π)^{-1} ∫_0^1 g(x) / (1 - 2x cos λ + x²) dx`.
pub fn spectral_density(alpha: f64, beta: f64, lambda: f64) -> Result<f64> {
    CoefficientLaw::new(alpha, beta)?;
    if !(lambda.abs() <= PI) {
        return Err(Error::Parameter(format!(
            "lambda must lie in [-π, π], got {lambda}"
        )));
    }
    if lambda == 0.0 && beta <= 2.0 {
        return Err(Error::Parameter(format!(
            "spectral density diverges at 0 for β ≤ 2 (β = {beta})"
        )));
    }
    let lam = lambda.abs();
    let sin_half = (lam / 2.0).sin();
    let ln_norm = std::f64::consts::LN_2 - ln_beta(alpha, beta);
    // integrate in u = 1 - x; |1 - x e^{-iλ}|² = u² + 4(1-u) sin²(λ/2)
    let integrand = |u: f64| {
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        let x = 1.0 - u;
        let g =
            (ln_norm + (2.0 * alpha - 1.0) * x.ln() + (beta - 1.0) * (u * (2.0 - u)).ln()).exp();
        g / (u * u + 4.0 * x * sin_half * sin_half)
    };
    let mut points = vec![SPLIT_NEAR_ONE];
    if lam > 0.0 && lam < 1.0 {
        points.push(lam);
        points.push(lam.sqrt());
    }
    let r = quad::integrate(integrand, 0.0, 1.0, &points, QuadOptions::default())?;
    Ok(r.value / (2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub beta: f64,
    /// Open interval `(1/(β+2), 1/β)` of admissible threshold exponents b
    /// for `δ = const · N^{-b}`.
    pub b_lower: f64,
    pub b_upper: f64,
    pub b: Option<f64>,
    pub b_admissible: Option<bool>,
    /// Strict lower bound on the exponent a in `T = N^a`, when b is given.
    pub a_lower: Option<f64>,
    /// The two terms whose maximum is `a_lower`.
    pub a_terms: Option<[f64; 2]>,
    /// `None` means p = ∞.
    pub p: Option<f64>,
}

/// Admissible rates for `δ = const·N^{-b}`, `T = N^a`; `p = None` means p = ∞.
pub fn rate_planner(beta: f64, p: Option<f64>, b: Option<f64>) -> Result<RateReport> {
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(Error::Parameter(format!("beta must be > 1, got {beta}")));
    }
    if let Some(p) = p {
        if !(p > 2.0) {
            return Err(Error::Parameter(format!("p must be > 2, got {p}")));
        }
    }
    let b_lower = 1.0 / (beta + 2.0);
    let b_upper = 1.0 / beta;
    let a_terms = b.map(|b| {
        let first = (1.0 + b * beta) / 2.0;
        let second = match p {
            Some(p) => (1.0 + b * beta) / p + (2.0 - beta) * b + 1.0,
            None => (2.0 - beta) * b + 1.0,
        };
        [first, second]
    });
    let a_lower = a_terms.map(|[x, y]| x.max(y));
    Ok(RateReport {
        beta,
        b_lower,
        b_upper,
        b,
        b_admissible: b.map(|b| b > b_lower && b < b_upper),
        a_lower,
        a_terms,
        p,
    })
}
