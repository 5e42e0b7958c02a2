//! Random-coefficient AR(1) data-generating process.
//!
//! Each series follows `X(t) = a X(t-1) + b η(t) + c ξ(t)` with `a² ~ Beta(α, β)`,
//! a common shock stream `η` shared by all series and idiosyncratic shocks `ξ`.

use crate::error::{Error, Result};
use crate::rng;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal, StudentT};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Law of the AR coefficient: density `2/B(α,β) x^{2α-1} (1-x²)^{β-1}` on (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientLaw {
    pub alpha: f64,
    pub beta: f64,
}

impl CoefficientLaw {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let law = CoefficientLaw { alpha, beta };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Parameter(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !(self.beta.is_finite() && self.beta > 1.0) {
            return Err(Error::Parameter(format!(
                "beta must be > 1, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        let ln = std::f64::consts::LN_2 - crate::special::ln_beta(self.alpha, self.beta)
            + (2.0 * self.alpha - 1.0) * x.ln()
            + (self.beta - 1.0) * (-x * x).ln_1p();
        ln.exp()
    }

    /// Fractional integration order `d = 1 - β/2` of the unconditional process.
    pub fn memory_parameter(&self) -> f64 {
        1.0 - self.beta / 2.0
    }
}

/// Draws `n` coefficients with `a = sqrt(G1 / (G1 + G2))`, `G1 ~ Γ(α)`, `G2 ~ Γ(β)`.
pub fn sample_coefficients<R: Rng + ?Sized>(
    law: &CoefficientLaw,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    law.validate()?;
    if n == 0 {
        return Err(Error::Parameter("coefficient count must be >= 1".into()));
    }
    let ga = Gamma::new(law.alpha, 1.0).map_err(|e| Error::Parameter(e.to_string()))?;
    let gb = Gamma::new(law.beta, 1.0).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x: f64 = ga.sample(rng);
        let y: f64 = gb.sample(rng);
        let a = (x / (x + y)).sqrt();
        // a == 1 would make 1/(1-a²) infinite; a == 0 leaves the open interval
        if a > 0.0 && a < 1.0 {
            out.push(a);
        }
    }
    Ok(out)
}

/// How the common and idiosyncratic shocks are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShockMode {
    /// (b, c) = (0, 1)
    Idiosyncratic,
    /// (b, c) = (1, 0)
    Common,
    /// Random (b, c) per series drawn from a weight law.
    Mixed(WeightLaw),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightLaw {
    /// (b, c) = (cos θ, sin θ), θ ~ U(0, π/2).
    UniformAngle,
    /// (b, c) = (1/√2, 1/√2).
    EqualSplit,
}

/// Unit-variance innovation law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnovationDist {
    Gaussian,
    /// Student t rescaled to unit variance.
    StudentT {
        df: f64,
    },
    Rademacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnovationSpec {
    pub shock_mode: ShockMode,
    pub dist: InnovationDist,
    /// The innovations have a finite moment of order `2p`.
    #[serde(default = "default_moment_order")]
    pub moment_order_p: f64,
}

fn default_moment_order() -> f64 {
    2.0
}

impl Default for InnovationSpec {
    fn default() -> Self {
        InnovationSpec {
            shock_mode: ShockMode::Idiosyncratic,
            dist: InnovationDist::Gaussian,
            moment_order_p: default_moment_order(),
        }
    }
}

impl InnovationSpec {
    pub fn validate(&self) -> Result<()> {
        let p = self.moment_order_p;
        if !(p > 1.0) {
            return Err(Error::Parameter(format!(
                "moment order p must be > 1, got {p}"
            )));
        }
        if let InnovationDist::StudentT { df } = self.dist {
            if !(df > 2.0 * p) {
                return Err(Error::Parameter(format!(
                    "student_t requires df > 2p = {}, got {df}",
                    2.0 * p
                )));
            }
        }
        Ok(())
    }

    pub fn uses_common_shocks(&self) -> bool {
        !matches!(self.shock_mode, ShockMode::Idiosyncratic)
    }

    /// Draws the (b, c) weights of one series.
    pub fn weights<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self.shock_mode {
            ShockMode::Idiosyncratic => (0.0, 1.0),
            ShockMode::Common => (1.0, 0.0),
            ShockMode::Mixed(WeightLaw::EqualSplit) => (
                std::f64::consts::FRAC_1_SQRT_2,
                std::f64::consts::FRAC_1_SQRT_2,
            ),
            ShockMode::Mixed(WeightLaw::UniformAngle) => {
                // open interval keeps b + c > 0 and both weights nonnegative
                let theta = rng.random::<f64>() * std::f64::consts::FRAC_PI_2;
                (theta.cos(), theta.sin())
            }
        }
    }

    fn sampler(&self) -> Result<Innovations> {
        self.validate()?;
        Ok(match self.dist {
            InnovationDist::Gaussian => Innovations::Gaussian,
            InnovationDist::StudentT { df } => Innovations::StudentT {
                dist: StudentT::new(df).map_err(|e| Error::Parameter(e.to_string()))?,
                scale: ((df - 2.0) / df).sqrt(),
            },
            InnovationDist::Rademacher => Innovations::Rademacher,
        })
    }
}

enum Innovations {
    Gaussian,
    StudentT { dist: StudentT<f64>, scale: f64 },
    Rademacher,
}

impl Innovations {
    #[inline]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Innovations::Gaussian => StandardNormal.sample(rng),
            Innovations::StudentT { dist, scale } => scale * dist.sample(rng),
            Innovations::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Burn-in length `min(⌈ln 1e-6 / ln a⌉, 1e5)` after which the start's weight is below 1e-6.
pub fn burn_in_len(a: f64) -> usize {
    if a <= 0.0 {
        return 0;
    }
    let m = ((1e-6f64).ln() / a.ln()).ceil();
    if m.is_finite() {
        (m as usize).min(100_000)
    } else {
        100_000
    }
}

fn uses_exact_start(spec: &InnovationSpec, b: f64) -> bool {
    matches!(spec.dist, InnovationDist::Gaussian) && b == 0.0
}

/// Simulates one stationary trajectory of length `t_len`.
///
/// `common_shocks`, when given, holds at least `t_len` values whose last
/// `t_len` entries are η(1..=T); any earlier entries are pre-sample shocks
/// consumed by the burn-in. Gaussian series without a common component start
/// exactly from N(0, (b²+c²)/(1-a²)); every other case starts from a
/// variance-matched draw followed by [`burn_in_len`] steps.
pub fn simulate_series<R: Rng + ?Sized>(
    a: f64,
    weights: (f64, f64),
    common_shocks: Option<&[f64]>,
    t_len: usize,
    spec: &InnovationSpec,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let innov = spec.sampler()?;
    simulate_with(a, weights, common_shocks, t_len, spec, &innov, rng)
}

#[allow(clippy::needless_range_loop)]
fn simulate_with<R: Rng + ?Sized>(
    a: f64,
    (b, c): (f64, f64),
    common_shocks: Option<&[f64]>,
    t_len: usize,
    spec: &InnovationSpec,
    innov: &Innovations,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::Parameter(format!(
            "AR coefficient must lie in [0, 1), got {a}"
        )));
    }
    if t_len < 2 {
        return Err(Error::Parameter("series length must be >= 2".into()));
    }
    if !(b >= 0.0 && c >= 0.0 && b + c > 0.0) {
        return Err(Error::Parameter(format!(
            "invalid shock weights ({b}, {c})"
        )));
    }
    let common = match (b > 0.0, common_shocks) {
        (true, Some(s)) if s.len() >= t_len => s,
        (true, Some(s)) => {
            return Err(Error::Parameter(format!(
                "need at least {t_len} common shocks, got {}",
                s.len()
            )))
        }
        (true, None) => return Err(Error::Parameter("common shocks required".into())),
        (false, _) => &[][..],
    };
    let sd = ((b * b + c * c) / (1.0 - a * a)).sqrt();
    let mut out = Vec::with_capacity(t_len);

    if uses_exact_start(spec, b) {
        let z: f64 = StandardNormal.sample(rng);
        let mut x = sd * z;
        out.push(x);
        for _ in 1..t_len {
            x = a * x + c * innov.draw(rng);
            out.push(x);
        }
        return Ok(out);
    }

    let pre = if b > 0.0 {
        common.len() - t_len
    } else {
        usize::MAX
    };
    let burn = burn_in_len(a).min(pre);
    let sample_common = if b > 0.0 {
        &common[common.len() - t_len..]
    } else {
        &[][..]
    };
    let burn_common = if b > 0.0 {
        &common[common.len() - t_len - burn..common.len() - t_len]
    } else {
        &[][..]
    };

    let mut x = sd * innov.draw(rng);
    for s in 0..burn {
        let eta = if b > 0.0 { burn_common[s] } else { 0.0 };
        x = a * x + b * eta + c * innov.draw(rng);
    }
    // the first sample value is the burnt-in start itself
    out.push(x);
    for t in 1..t_len {
        let eta = if b > 0.0 { sample_common[t] } else { 0.0 };
        x = a * x + b * eta + c * innov.draw(rng);
        out.push(x);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelConfig {
    pub n_series: usize,
    pub series_len: usize,
    pub law: CoefficientLaw,
    pub innovations: InnovationSpec,
    pub seed: u64,
}

impl PanelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_series < 1 {
            return Err(Error::Parameter("n_series must be >= 1".into()));
        }
        if self.series_len < 2 {
            return Err(Error::Parameter("series_len must be >= 2".into()));
        }
        self.law.validate()?;
        self.innovations.validate()
    }
}

/// Everything drawn before the per-series shocks: coefficients, weights and
/// the common shock path. Series `i` is then a pure function of the plan and
/// its own stream, so series can be generated in any order or in parallel.
pub struct PanelPlan {
    pub config: PanelConfig,
    pub coeffs: Vec<f64>,
    pub weights: Vec<(f64, f64)>,
    pub common: Option<Vec<f64>>,
    innov: Innovations,
}

impl PanelPlan {
    pub fn new(config: &PanelConfig) -> Result<Self> {
        config.validate()?;
        let n = config.n_series;
        let t = config.series_len;
        let coeffs = sample_coefficients(
            &config.law,
            n,
            &mut rng::stream(config.seed, rng::COEFFICIENTS),
        )?;
        let mut wrng = rng::stream(config.seed, rng::WEIGHTS);
        let weights: Vec<(f64, f64)> = (0..n)
            .map(|_| config.innovations.weights(&mut wrng))
            .collect();
        let common = if config.innovations.uses_common_shocks() {
            let pre = coeffs
                .iter()
                .zip(&weights)
                .filter(|(_, w)| w.0 > 0.0)
                .map(|(&a, _)| burn_in_len(a))
                .max()
                .unwrap_or(0);
            let innov = config.innovations.sampler()?;
            let mut crng = rng::stream(config.seed, rng::COMMON_SHOCKS);
            Some((0..pre + t).map(|_| innov.draw(&mut crng)).collect())
        } else {
            None
        };
        Ok(PanelPlan {
            config: config.clone(),
            coeffs,
            weights,
            common,
            innov: config.innovations.sampler()?,
        })
    }

    pub fn series(&self, i: usize) -> Result<Vec<f64>> {
        let mut rng = rng::stream(self.config.seed, rng::series_stream(i));
        simulate_with(
            self.coeffs[i],
            self.weights[i],
            self.common.as_deref(),
            self.config.series_len,
            &self.config.innovations,
            &self.innov,
            &mut rng,
        )
    }
}

/// N series of length T, stored row-major (series by series).
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    values: Vec<f64>,
    pub true_coeffs: Option<Vec<f64>>,
    pub config: PanelConfig,
}

impl Panel {
    /// Builds a panel from row-major values; checks shape and finiteness.
    pub fn from_values(
        values: Vec<f64>,
        true_coeffs: Option<Vec<f64>>,
        config: PanelConfig,
    ) -> Result<Self> {
        let n = config.n_series;
        let t = config.series_len;
        if values.len() != n * t {
            return Err(Error::Format(format!(
                "expected {n}x{t} values, got {}",
                values.len()
            )));
        }
        if let Some(tc) = &true_coeffs {
            if tc.len() != n {
                return Err(Error::Format(format!(
                    "expected {n} true coefficients, got {}",
                    tc.len()
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("panel contains non-finite values".into()));
        }
        Ok(Panel {
            values,
            true_coeffs,
            config,
        })
    }

    pub fn n_series(&self) -> usize {
        self.config.n_series
    }

    pub fn series_len(&self) -> usize {
        self.config.series_len
    }

    pub fn series(&self, i: usize) -> &[f64] {
        let t = self.series_len();
        &self.values[i * t..(i + 1) * t]
    }

    pub fn iter_series(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.series_len())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn simulate_panel(config: &PanelConfig, keep_truth: bool) -> Result<Panel> {
    let plan = PanelPlan::new(config)?;
    let rows: Vec<Vec<f64>> = (0..config.n_series)
        .into_par_iter()
        .map(|i| plan.series(i))
        .collect::<Result<_>>()?;
    let values = rows.concat();
    let truth = keep_truth.then(|| plan.coeffs.clone());
    Panel::from_values(values, truth, plan.config)
}

/// Contemporaneous aggregate `N^{-1/2} Σ_i X_i(t)`.
pub fn aggregate_panel(panel: &Panel) -> Vec<f64> {
    let scale = 1.0 / (panel.n_series() as f64).sqrt();
    let mut agg = vec![0.0; panel.series_len()];
    for s in panel.iter_series() {
        for (acc, x) in agg.iter_mut().zip(s) {
            *acc += x;
        }
    }
    agg.iter_mut().for_each(|v| *v *= scale);
    agg
}
