#![allow(dead_code)]

use rand::Rng;
use rcar_tail::rng;

/// Coefficients with `1 - a = U^{1/β}`, so `P(a > 1 - x) = x^β` exactly.
pub fn pareto_coefficients(beta: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, 0);
    (0..n)
        .map(|_| 1.0 - r.random::<f64>().powf(1.0 / beta))
        .collect()
}

/// `N ∫_lo^δ F(x)/x dx` for the empirical cdf F of `1 - a`, integrated
/// piece by piece between consecutive order statistics.
pub fn integral_form(coeffs: &[f64], lo: f64, delta: f64) -> (usize, f64) {
    let mut u: Vec<f64> = coeffs
        .iter()
        .map(|a| 1.0 - a)
        .filter(|&u| u < delta)
        .collect();
    u.sort_by(f64::total_cmp);
    assert!(u.first().is_none_or(|&v| v >= lo));
    let mut total = 0.0;
    for j in 0..u.len() {
        let next = if j + 1 < u.len() { u[j + 1] } else { delta };
        total += (j + 1) as f64 * (next / u[j]).ln();
    }
    (u.len(), total)
}

/// β estimate from the integral form; the noisy variant integrates from the
/// cap `δ^r` as represented, `1 - fl(1 - δ^r)`.
pub fn estimate_by_integral(coeffs: &[f64], delta: f64, r: Option<f64>) -> f64 {
    let (vals, lo): (Vec<f64>, f64) = match r {
        Some(r) => {
            let cap = 1.0 - delta.powf(r);
            (coeffs.iter().map(|&a| a.min(cap)).collect(), 1.0 - cap)
        }
        None => (coeffs.to_vec(), 0.0),
    };
    let (k, integral) = integral_form(&vals, lo, delta);
    k as f64 / integral
}
