//! Seeded, parallel Monte Carlo experiments.
//!
//! Replication `j` of scenario `s` draws its panel from the key
//! `derive_path(master_seed, [s, j])`; the exact and noisy estimators see the
//! same coefficients, and all (ε, r) combinations share one panel. Outcomes
//! are merged in scenario/replication order, so the report does not depend on
//! the number of worker threads.

use crate::acf::lag1_autocorr;
use crate::error::{Error, Result};
use crate::model::{
    sample_coefficients, simulate_series, CoefficientLaw, InnovationDist, InnovationSpec,
    PanelConfig, PanelPlan, ShockMode,
};
use crate::rng;
use crate::tailest::{long_memory_test, tail_index_gs, tail_index_noisy, Method};
use crate::threshold::adaptive_delta;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub alpha: f64,
    pub beta: f64,
    #[serde(alias = "N")]
    pub n_series: usize,
    #[serde(alias = "T")]
    pub series_len: usize,
    #[serde(default = "idiosyncratic")]
    pub shock_mode: ShockMode,
    #[serde(default = "gaussian")]
    pub dist: InnovationDist,
}

fn idiosyncratic() -> ShockMode {
    ShockMode::Idiosyncratic
}

fn gaussian() -> InnovationDist {
    InnovationDist::Gaussian
}

impl Scenario {
    pub fn new(alpha: f64, beta: f64, n_series: usize, series_len: usize) -> Self {
        Scenario {
            alpha,
            beta,
            n_series,
            series_len,
            shock_mode: ShockMode::Idiosyncratic,
            dist: InnovationDist::Gaussian,
        }
    }

    pub fn panel_config(&self, seed: u64) -> PanelConfig {
        PanelConfig {
            n_series: self.n_series,
            series_len: self.series_len,
            law: CoefficientLaw {
                alpha: self.alpha,
                beta: self.beta,
            },
            innovations: InnovationSpec {
                shock_mode: self.shock_mode,
                dist: self.dist,
                ..Default::default()
            },
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    NoisyOnly,
    ExactOnly,
    Both,
}

impl Mode {
    fn noisy(self) -> bool {
        matches!(self, Mode::NoisyOnly | Mode::Both)
    }
    fn exact(self) -> bool {
        matches!(self, Mode::ExactOnly | Mode::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub scenarios: Vec<Scenario>,
    pub epsilon_grid: Vec<f64>,
    pub r_grid: Vec<f64>,
    pub omega: f64,
    pub replications: usize,
    pub master_seed: u64,
    pub mode: Mode,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Spec("replications must be >= 1".into()));
        }
        if self.scenarios.is_empty() || self.epsilon_grid.is_empty() {
            return Err(Error::Spec(
                "scenario list and epsilon grid must be non-empty".into(),
            ));
        }
        if self.mode.noisy() && self.r_grid.is_empty() {
            return Err(Error::Spec(
                "r grid must be non-empty for the noisy estimator".into(),
            ));
        }
        if let Some(e) = self.epsilon_grid.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::Spec(format!("epsilon {e} outside (0, 1]")));
        }
        if let Some(r) = self.r_grid.iter().find(|&&r| !(r > 1.0 && r.is_finite())) {
            return Err(Error::Spec(format!("truncation order {r} must be > 1")));
        }
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return Err(Error::Spec(format!("omega {} outside (0, 1)", self.omega)));
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            s.panel_config(0)
                .validate()
                .map_err(|e| Error::Spec(format!("scenario {i}: {e}")))?;
        }
        Ok(())
    }
}

/// One estimator run inside a replication; `None` marks a counted failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub beta_hat: f64,
    pub exceedances: usize,
    pub delta: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    /// Indexed `[ε][r]`.
    pub noisy: Vec<Vec<Option<Trial>>>,
    /// Indexed `[ε]`.
    pub exact: Vec<Option<Trial>>,
}

fn trial(beta_hat: f64, exceedances: usize, delta: f64, reject: bool) -> Trial {
    Trial {
        beta_hat,
        exceedances,
        delta,
        reject,
    }
}

fn swallow<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_estimation_failure() => Ok(None),
        Err(e) => Err(e),
    }
}

fn noisy_trials(a_hat: &[f64], spec: &ExperimentSpec) -> Result<Vec<Vec<Option<Trial>>>> {
    spec.epsilon_grid
        .iter()
        .map(|&eps| {
            let choice = match swallow(adaptive_delta(a_hat, eps))? {
                Some(c) => c,
                None => return Ok(vec![None; spec.r_grid.len()]),
            };
            spec.r_grid
                .iter()
                .map(|&r| {
                    swallow(tail_index_noisy(a_hat, choice.delta, r).and_then(|e| {
                        let t = long_memory_test(&e, spec.omega)?;
                        Ok(trial(e.beta_hat, e.exceedances, e.delta, t.reject_h0))
                    }))
                })
                .collect()
        })
        .collect()
}

fn exact_trials(coeffs: &[f64], spec: &ExperimentSpec) -> Result<Vec<Option<Trial>>> {
    spec.epsilon_grid
        .iter()
        .map(|&eps| {
            swallow(adaptive_delta(coeffs, eps).and_then(|c| {
                let e = tail_index_gs(coeffs, c.delta)?;
                let t = long_memory_test(&e, spec.omega)?;
                Ok(trial(e.beta_hat, e.exceedances, e.delta, t.reject_h0))
            }))
        })
        .collect()
}

/// Runs replication `rep` of scenario `scenario`.
pub fn replicate(spec: &ExperimentSpec, scenario: usize, rep: usize) -> Result<Replication> {
    let sc = spec
        .scenarios
        .get(scenario)
        .ok_or_else(|| Error::Spec(format!("no scenario {scenario}")))?;
    let seed = rng::derive_path(spec.master_seed, &[scenario as u64, rep as u64]);
    let plan = PanelPlan::new(&sc.panel_config(seed))?;
    let noisy = if spec.mode.noisy() {
        let a_hat: Result<Vec<f64>> = (0..sc.n_series)
            .map(|i| lag1_autocorr(&plan.series(i)?))
            .collect();
        match swallow(a_hat)? {
            Some(a_hat) => noisy_trials(&a_hat, spec)?,
            None => vec![vec![None; spec.r_grid.len()]; spec.epsilon_grid.len()],
        }
    } else {
        Vec::new()
    };
    let exact = if spec.mode.exact() {
        exact_trials(&plan.coeffs, spec)?
    } else {
        Vec::new()
    };
    Ok(Replication { noisy, exact })
}

fn thread_pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))
}

/// All replications of all scenarios, indexed `[scenario][replication]`.
/// `parallelism = 0` uses every available core.
pub fn run_replications(
    spec: &ExperimentSpec,
    parallelism: usize,
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<Vec<Vec<Replication>>> {
    spec.validate()?;
    let pool = thread_pool(parallelism)?;
    pool.install(|| {
        (0..spec.scenarios.len())
            .map(|s| {
                let reps = (0..spec.replications)
                    .into_par_iter()
                    .map(|j| replicate(spec, s, j))
                    .collect::<Result<Vec<_>>>()?;
                if let Some(cb) = progress {
                    cb(s, spec.scenarios.len());
                }
                Ok(reps)
            })
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scenario: usize,
    pub alpha: f64,
    pub beta: f64,
    pub n_series: usize,
    pub series_len: usize,
    pub estimator: Method,
    pub epsilon: f64,
    pub r: Option<f64>,
    pub successes: usize,
    pub rmse: f64,
    pub bias: f64,
    pub sd: f64,
    pub rejection_rate: f64,
    pub failure_count: usize,
    pub mean_exceedances: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub seed: u64,
    pub replications: usize,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub meta: ReportMeta,
}

/// Summary of estimates against the true β: population moments so that
/// `rmse² = bias² + sd²`.
pub fn summarize<'a>(trials: impl Iterator<Item = &'a Option<Trial>>, beta: f64) -> Summary {
    let mut ok = Vec::new();
    let mut failures = 0;
    for t in trials {
        match t {
            Some(t) => ok.push(*t),
            None => failures += 1,
        }
    }
    let n = ok.len() as f64;
    let mean = ok.iter().map(|t| t.beta_hat).sum::<f64>() / n;
    let var = ok.iter().map(|t| (t.beta_hat - mean).powi(2)).sum::<f64>() / n;
    let mse = ok.iter().map(|t| (t.beta_hat - beta).powi(2)).sum::<f64>() / n;
    Summary {
        successes: ok.len(),
        failures,
        bias: mean - beta,
        sd: var.sqrt(),
        rmse: mse.sqrt(),
        rejection_rate: ok.iter().filter(|t| t.reject).count() as f64 / n,
        mean_exceedances: ok.iter().map(|t| t.exceedances as f64).sum::<f64>() / n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub successes: usize,
    pub failures: usize,
    pub bias: f64,
    pub sd: f64,
    pub rmse: f64,
    pub rejection_rate: f64,
    pub mean_exceedances: f64,
}

pub fn aggregate(spec: &ExperimentSpec, outcomes: &[Vec<Replication>]) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for (s, (sc, reps)) in spec.scenarios.iter().zip(outcomes).enumerate() {
        let row = |estimator, epsilon, r, sm: Summary| ReportRow {
            scenario: s,
            alpha: sc.alpha,
            beta: sc.beta,
            n_series: sc.n_series,
            series_len: sc.series_len,
            estimator,
            epsilon,
            r,
            successes: sm.successes,
            rmse: sm.rmse,
            bias: sm.bias,
            sd: sm.sd,
            rejection_rate: sm.rejection_rate,
            failure_count: sm.failures,
            mean_exceedances: sm.mean_exceedances,
        };
        if spec.mode.noisy() {
            for (ei, &eps) in spec.epsilon_grid.iter().enumerate() {
                for (ri, &r) in spec.r_grid.iter().enumerate() {
                    let sm = summarize(reps.iter().map(|rep| &rep.noisy[ei][ri]), sc.beta);
                    rows.push(row(Method::Noisy, eps, Some(r), sm));
                }
            }
        }
        if spec.mode.exact() {
            for (ei, &eps) in spec.epsilon_grid.iter().enumerate() {
                let sm = summarize(reps.iter().map(|rep| &rep.exact[ei]), sc.beta);
                rows.push(row(Method::Exact, eps, None, sm));
            }
        }
    }
    rows
}

pub fn run_experiment(spec: &ExperimentSpec, parallelism: usize) -> Result<ExperimentReport> {
    run_experiment_with_progress(spec, parallelism, None)
}

pub fn run_experiment_with_progress(
    spec: &ExperimentSpec,
    parallelism: usize,
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let outcomes = run_replications(spec, parallelism, progress)?;
    Ok(ExperimentReport {
        rows: aggregate(spec, &outcomes),
        meta: ReportMeta {
            seed: spec.master_seed,
            replications: spec.replications,
            wall_time_secs: start.elapsed().as_secs_f64(),
        },
    })
}

const REPORT_HEADER: [&str; 15] = [
    "scenario",
    "alpha",
    "beta",
    "n_series",
    "series_len",
    "estimator",
    "epsilon",
    "r",
    "successes",
    "rmse",
    "bias",
    "sd",
    "rejection_rate",
    "failure_count",
    "mean_exceedances",
];

/// Writes the report rows as CSV (meta goes to a separate JSON document).
pub fn write_report_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in rows {
        let est = match r.estimator {
            Method::Exact => "exact",
            Method::Noisy => "noisy",
        };
        w.write_record([
            r.scenario.to_string(),
            r.alpha.to_string(),
            r.beta.to_string(),
            r.n_series.to_string(),
            r.series_len.to_string(),
            est.to_string(),
            r.epsilon.to_string(),
            r.r.map(|v| v.to_string()).unwrap_or_default(),
            r.successes.to_string(),
            r.rmse.to_string(),
            r.bias.to_string(),
            r.sd.to_string(),
            r.rejection_rate.to_string(),
            r.failure_count.to_string(),
            r.mean_exceedances.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub series_len: usize,
    pub probability: f64,
    pub std_error: f64,
}

/// Empirical `P(|â - a| > eps)` for each series length in `t_grid`.
///
/// Replication `k` uses the same coefficient draw for every T; the series are
/// independent across T. Gaussian idiosyncratic innovations.
pub fn noise_probe(
    alpha: f64,
    beta: f64,
    t_grid: &[usize],
    eps: f64,
    reps: usize,
    seed: u64,
) -> Result<Vec<ProbePoint>> {
    let law = CoefficientLaw::new(alpha, beta)?;
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("eps must be > 0, got {eps}")));
    }
    if reps == 0 || t_grid.is_empty() {
        return Err(Error::Parameter(
            "probe needs reps >= 1 and a non-empty T grid".into(),
        ));
    }
    if let Some(t) = t_grid.iter().find(|&&t| t < 2) {
        return Err(Error::Parameter(format!("series length {t} < 2")));
    }
    let spec = InnovationSpec::default();
    t_grid
        .iter()
        .enumerate()
        .map(|(j, &t_len)| {
            let hits = (0..reps)
                .into_par_iter()
                .map(|k| -> Result<usize> {
                    let key = rng::derive_path(seed, &[k as u64]);
                    let a =
                        sample_coefficients(&law, 1, &mut rng::stream(key, rng::COEFFICIENTS))?[0];
                    let mut srng =
                        rng::stream(rng::derive_path(key, &[j as u64]), rng::series_stream(0));
                    let x = simulate_series(a, (0.0, 1.0), None, t_len, &spec, &mut srng)?;
                    Ok(usize::from((lag1_autocorr(&x)? - a).abs() > eps))
                })
                .sum::<Result<usize>>()?;
            let p = hits as f64 / reps as f64;
            Ok(ProbePoint {
                series_len: t_len,
                probability: p,
                std_error: (p * (1.0 - p) / reps as f64).sqrt(),
            })
        })
        .collect()
}
