//! Special functions: standard normal quantile and log-beta.

use statrs::distribution::{ContinuousCDF, Normal};

/// Standard normal quantile. Returns ±∞ at the endpoints and NaN outside [0, 1].
pub fn normal_quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    Normal::standard().inverse_cdf(p)
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    statrs::function::gamma::ln_gamma(a) + statrs::function::gamma::ln_gamma(b)
        - statrs::function::gamma::ln_gamma(a + b)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}
