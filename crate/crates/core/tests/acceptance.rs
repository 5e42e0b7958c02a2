//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

mod common;

use common::{estimate_by_integral, pareto_coefficients};
use rand::Rng;
use rayon::prelude::*;
use rcar_tail::mc::{self, ExperimentSpec, Mode, Scenario, Trial};
use rcar_tail::quad::{self, QuadOptions};
use rcar_tail::rng;
use rcar_tail::tailest::{confidence_interval, tail_index_gs, tail_index_noisy, Method};
use rcar_tail::theory;
use rcar_tail::Result;
use std::f64::consts::PI;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn spec(
    scenarios: Vec<Scenario>,
    eps: &[f64],
    r: &[f64],
    reps: usize,
    seed: u64,
    mode: Mode,
) -> ExperimentSpec {
    ExperimentSpec {
        scenarios,
        epsilon_grid: eps.to_vec(),
        r_grid: r.to_vec(),
        omega: 0.05,
        replications: reps,
        master_seed: seed,
        mode,
    }
}

fn row(rows: &[mc::ReportRow], scenario: usize, method: Method, eps: f64) -> &mc::ReportRow {
    rows.iter()
        .find(|r| r.scenario == scenario && r.estimator == method && r.epsilon == eps)
        .expect("report row")
}

// 1. noisy estimator, (N, T) = (750, 1000), α = 0.75, β = 1.5, ε = 0.9
const C1_RMSE: (f64, f64) = (0.18, 0.06);
const C1_BIAS: (f64, f64) = (-0.01, 0.05);

fn criterion_1() -> Result<Outcome> {
    let s = spec(
        vec![Scenario::new(0.75, 1.5, 750, 1000)],
        &[0.9],
        &[10.0],
        500,
        101,
        Mode::NoisyOnly,
    );
    let rep = mc::run_experiment(&s, 0)?;
    let r = row(&rep.rows, 0, Method::Noisy, 0.9);
    let pass = within(r.rmse, C1_RMSE.0, C1_RMSE.1) && within(r.bias, C1_BIAS.0, C1_BIAS.1);
    Ok(Outcome {
        pass,
        detail: format!(
            "noisy RMSE {:.3} (target {}±{}), bias {:+.3} (target {}±{}), failures {}",
            r.rmse, C1_RMSE.0, C1_RMSE.1, r.bias, C1_BIAS.0, C1_BIAS.1, r.failure_count
        ),
    })
}

// 2. same panel size, α = 1.5, β = 2.0, noisy and paired exact
const C2_NOISY_RMSE: (f64, f64) = (0.21, 0.06);
const C2_NOISY_BIAS: (f64, f64) = (-0.10, 0.05);
const C2_EXACT_RMSE: (f64, f64) = (0.25, 0.06);

fn criterion_2() -> Result<Outcome> {
    let s = spec(
        vec![Scenario::new(1.5, 2.0, 750, 1000)],
        &[0.9],
        &[10.0],
        500,
        102,
        Mode::Both,
    );
    let rep = mc::run_experiment(&s, 0)?;
    let n = row(&rep.rows, 0, Method::Noisy, 0.9);
    let e = row(&rep.rows, 0, Method::Exact, 0.9);
    let pass = within(n.rmse, C2_NOISY_RMSE.0, C2_NOISY_RMSE.1)
        && within(n.bias, C2_NOISY_BIAS.0, C2_NOISY_BIAS.1)
        && within(e.rmse, C2_EXACT_RMSE.0, C2_EXACT_RMSE.1);
    Ok(Outcome {
        pass,
        detail: format!(
            "noisy RMSE {:.3} (target {}±{}), noisy bias {:+.3} (target {}±{}), exact RMSE {:.3} (target {}±{})",
            n.rmse,
            C2_NOISY_RMSE.0,
            C2_NOISY_RMSE.1,
            n.bias,
            C2_NOISY_BIAS.0,
            C2_NOISY_BIAS.1,
            e.rmse,
            C2_EXACT_RMSE.0,
            C2_EXACT_RMSE.1
        ),
    })
}

// 3. rejection rates in percent, (750, 2000), ε = 0.7, α = 0.75
const C3_BETA_125: (f64, f64) = (93.5, 4.0);
const C3_BETA_25_MAX: f64 = 1.5;
const C3_BETA_2: (f64, f64) = (8.0, 4.0);

fn criterion_3() -> Result<Outcome> {
    let scenarios = vec![
        Scenario::new(0.75, 1.25, 750, 2000),
        Scenario::new(0.75, 2.5, 750, 2000),
        Scenario::new(0.75, 2.0, 750, 2000),
    ];
    let rep = mc::run_experiment(
        &spec(scenarios, &[0.7], &[10.0], 500, 103, Mode::NoisyOnly),
        0,
    )?;
    let rate = |s| 100.0 * row(&rep.rows, s, Method::Noisy, 0.7).rejection_rate;
    let (r0, r1, r2) = (rate(0), rate(1), rate(2));
    let pass = within(r0, C3_BETA_125.0, C3_BETA_125.1)
        && r1 <= C3_BETA_25_MAX
        && within(r2, C3_BETA_2.0, C3_BETA_2.1);
    Ok(Outcome {
        pass,
        detail: format!(
            "β=1.25: {r0:.1}% (target {}±{}), β=2.5: {r1:.1}% (max {C3_BETA_25_MAX}), β=2.0: {r2:.1}% (target {}±{})",
            C3_BETA_125.0, C3_BETA_125.1, C3_BETA_2.0, C3_BETA_2.1
        ),
    })
}

// 4. rejection rate in percent, (750, 2000), ε = 0.9, α = 0.75, β = 2
const C4_BETA_2: (f64, f64) = (26.7, 6.0);

fn criterion_4() -> Result<Outcome> {
    let s = spec(
        vec![Scenario::new(0.75, 2.0, 750, 2000)],
        &[0.9],
        &[10.0],
        500,
        104,
        Mode::NoisyOnly,
    );
    let rep = mc::run_experiment(&s, 0)?;
    let r = 100.0 * row(&rep.rows, 0, Method::Noisy, 0.9).rejection_rate;
    Ok(Outcome {
        pass: within(r, C4_BETA_2.0, C4_BETA_2.1),
        detail: format!("β=2.0: {r:.1}% (target {}±{})", C4_BETA_2.0, C4_BETA_2.1),
    })
}

// 5. exact-Pareto coefficients, β = 1.5, κ = 1
const C5_N: usize = 100_000;
const C5_DELTA: f64 = 0.02;
const C5_REPS: u64 = 2000;
const C5_COVERAGE: (f64, f64) = (0.925, 0.975);
const C5_VAR_REL: f64 = 0.15;

fn criterion_5() -> Result<Outcome> {
    let beta = 1.5;
    let scale = (C5_N as f64 * C5_DELTA.powf(beta)).sqrt();
    let draws: Vec<(bool, f64)> = (0..C5_REPS)
        .into_par_iter()
        .map(|k| {
            let a = pareto_coefficients(beta, C5_N, rng::derive_path(5, &[k]));
            let e = tail_index_gs(&a, C5_DELTA)?;
            let (lo, hi) = confidence_interval(&e, 0.95)?;
            Ok((lo <= beta && beta <= hi, scale * (e.beta_hat - beta)))
        })
        .collect::<Result<_>>()?;
    let n = draws.len() as f64;
    let coverage = draws.iter().filter(|d| d.0).count() as f64 / n;
    let mean = draws.iter().map(|d| d.1).sum::<f64>() / n;
    let var = draws.iter().map(|d| (d.1 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let target = beta * beta;
    let pass = coverage >= C5_COVERAGE.0
        && coverage <= C5_COVERAGE.1
        && (var / target - 1.0).abs() <= C5_VAR_REL;
    Ok(Outcome {
        pass,
        detail: format!(
            "coverage {:.1}% (range [{}, {}]%), scaled variance {var:.3} (target {target} within {}%)",
            100.0 * coverage,
            100.0 * C5_COVERAGE.0,
            100.0 * C5_COVERAGE.1,
            100.0 * C5_VAR_REL
        ),
    })
}

// 6. sum form against piecewise integral of the empirical tail
const C6_SAMPLES: u64 = 1000;
const C6_REL_TOL: f64 = 1e-10;

fn criterion_6() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut compared = 0;
    for k in 0..C6_SAMPLES {
        let mut r = rng::stream(6, k);
        let n = r.random_range(20..2000);
        let beta = r.random_range(1.05..3.0);
        let a = pareto_coefficients(beta, n, rng::derive_path(60, &[k]));
        let delta = r.random_range(0.02..0.5);
        let trunc = r.random_range(1.5..20.0);
        if let Ok(e) = tail_index_gs(&a, delta) {
            worst = worst.max((e.beta_hat / estimate_by_integral(&a, delta, None) - 1.0).abs());
            compared += 1;
        }
        // noisy form on perturbed values, some pushed past the cap
        let noisy: Vec<f64> = a.iter().map(|&x| x + r.random_range(-0.01..0.01)).collect();
        if let Ok(e) = tail_index_noisy(&noisy, delta, trunc) {
            worst = worst
                .max((e.beta_hat / estimate_by_integral(&noisy, delta, Some(trunc)) - 1.0).abs());
            compared += 1;
        }
    }
    Ok(Outcome {
        pass: worst <= C6_REL_TOL && compared >= C6_SAMPLES as usize,
        detail: format!(
            "{compared} comparisons, worst relative gap {worst:.2e} (tol {C6_REL_TOL:e})"
        ),
    })
}

// 7. closed-form identities and the simulated tail
const C7_ACF_TOL: f64 = 1e-12;
const C7_MASS_REL: f64 = 1e-6;
const C7_TAIL_N: usize = 10_000_000;
const C7_TAIL_X: f64 = 0.01;
const C7_TAIL_SE: f64 = 3.0;

fn criterion_7() -> Result<Outcome> {
    let (alpha, beta) = (1.5, 2.5);
    let g0 = theory::autocovariance(alpha, beta, 0)?;
    let g2 = theory::autocovariance(alpha, beta, 2)?;
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-10,
        max_intervals: 2000,
    };
    let half = quad::integrate(
        |l| theory::spectral_density(alpha, beta, l).unwrap_or(f64::NAN),
        0.0,
        PI,
        &[1e-6, 1e-3, 0.1],
        opts,
    )?
    .value;
    let mass_gap = (2.0 * half / g0 - 1.0).abs();

    let tc = theory::beta_model_constants(alpha, beta)?;
    let law = rcar_tail::model::CoefficientLaw::new(alpha, beta)?;
    let a = rcar_tail::model::sample_coefficients(&law, C7_TAIL_N, &mut rng::stream(7, 0))?;
    let count = a.iter().filter(|&&v| 1.0 - v < C7_TAIL_X).count() as f64;
    let expected = C7_TAIL_N as f64 * tc.kappa * C7_TAIL_X.powf(beta) * (1.0 + tc.tau * C7_TAIL_X);
    let z = (count - expected) / expected.sqrt();

    let pass = within(g0, 2.0, C7_ACF_TOL)
        && within(g2, 1.0, C7_ACF_TOL)
        && mass_gap <= C7_MASS_REL
        && z.abs() <= C7_TAIL_SE;
    Ok(Outcome {
        pass,
        detail: format!(
            "γ(0)={g0}, γ(2)={g2} (tol {C7_ACF_TOL:e}), spectral mass gap {mass_gap:.1e} (tol {C7_MASS_REL:e}), \
             tail count {count} vs {expected:.1} (z={z:+.2}, limit {C7_TAIL_SE})"
        ),
    })
}

// 8. noise probe at α = 1.5, β = 2.5
const C8_REPS: usize = 5000;
const C8_EPS: f64 = 0.1;
const C8_DECAY: f64 = 0.5;

fn criterion_8() -> Result<Outcome> {
    let p = mc::noise_probe(1.5, 2.5, &[200, 1600], C8_EPS, C8_REPS, 8)?;
    let q = mc::noise_probe(1.5, 2.5, &[200, 1600], 2.0, C8_REPS, 8)?;
    let zero = q.iter().all(|pt| pt.probability == 0.0);
    let pass = p[1].probability <= C8_DECAY * p[0].probability && zero;
    Ok(Outcome {
        pass,
        detail: format!(
            "P(T=200)={:.4}, P(T=1600)={:.4} (must be ≤ {C8_DECAY}×), P at eps=2 all zero: {zero}",
            p[0].probability, p[1].probability
        ),
    })
}

// 9. r = 10 and r = 20 give the same estimate
const C9_REPS: usize = 500;
const C9_MIN_SHARE: f64 = 0.99;

fn criterion_9() -> Result<Outcome> {
    let s = spec(
        vec![Scenario::new(0.75, 1.5, 750, 1000)],
        &[0.9],
        &[10.0, 20.0],
        C9_REPS,
        109,
        Mode::NoisyOnly,
    );
    let reps = mc::run_replications(&s, 0, None)?;
    let same = reps[0]
        .iter()
        .filter(|r| {
            let (a, b): (&Option<Trial>, &Option<Trial>) = (&r.noisy[0][0], &r.noisy[0][1]);
            match (a, b) {
                (Some(x), Some(y)) => x.beta_hat == y.beta_hat,
                (None, None) => true,
                _ => false,
            }
        })
        .count();
    let share = same as f64 / C9_REPS as f64;
    Ok(Outcome {
        pass: share >= C9_MIN_SHARE,
        detail: format!(
            "{same} of {C9_REPS} identical ({:.1}%, need {}%)",
            100.0 * share,
            100.0 * C9_MIN_SHARE
        ),
    })
}

// 10. report bytes do not depend on the thread count
fn criterion_10() -> Result<Outcome> {
    let s = spec(
        vec![
            Scenario::new(0.75, 1.5, 200, 300),
            Scenario::new(1.5, 2.0, 150, 200),
        ],
        &[0.8, 0.9],
        &[3.0, 10.0],
        24,
        110,
        Mode::Both,
    );
    let bytes = |threads| -> Result<Vec<u8>> {
        let rep = mc::run_experiment(&s, threads)?;
        let mut out = Vec::new();
        mc::write_report_csv(&rep.rows, &mut out)?;
        Ok(out)
    };
    let base = bytes(1)?;
    let same = [2, 3, 8]
        .iter()
        .map(|&t| bytes(t))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .all(|b| *b == base);
    Ok(Outcome {
        pass: same,
        detail: format!(
            "{} report bytes, identical at 1, 2, 3 and 8 threads: {same}",
            base.len()
        ),
    })
}

type Criterion = (u32, &'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "noisy estimator accuracy, β=1.5", criterion_1),
        (2, "noisy and exact accuracy, β=2.0", criterion_2),
        (3, "rejection rates at ε=0.7", criterion_3),
        (4, "rejection rate at ε=0.9", criterion_4),
        (5, "oracle confidence interval coverage", criterion_5),
        (6, "sum and integral forms agree", criterion_6),
        (7, "theory identities", criterion_7),
        (8, "noise probe decay", criterion_8),
        (9, "truncation order has no effect", criterion_9),
        (10, "determinism across thread counts", criterion_10),
    ];
    let mut failed = Vec::new();
    for (id, name, run) in criteria {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {id:>2} {}: {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
