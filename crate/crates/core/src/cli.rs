//! Command-line surface.
//!
//! Exit codes: 0 success, 1 usage error, 2 input/data error, 3 numeric or
//! estimation failure.

use crate::acf::lag1_autocorr;
use crate::error::{Error, Result};
use crate::io::{self, PanelMeta};
use crate::mc::{self, ExperimentSpec};
use crate::model::{simulate_panel, PanelConfig};
use crate::tailest::{self, EstimateResult, TestResult};
use crate::theory;
use crate::threshold::{adaptive_delta, ThresholdChoice};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "rcar",
    version,
    about = "Tail-index inference for panel random-coefficient AR(1) data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a panel from a JSON PanelConfig and write it as wide CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Store the true AR coefficients in the sidecar JSON.
        #[arg(long)]
        keep_truth: bool,
    },
    /// Estimate the tail index β from a panel CSV.
    Estimate {
        #[command(flatten)]
        est: EstimateArgs,
        /// Confidence level of the reported interval.
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test H0: β ≥ 2 against long memory (β < 2).
    Test {
        #[command(flatten)]
        est: EstimateArgs,
        #[arg(long, default_value_t = 0.05)]
        omega: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form model quantities as CSV.
    Theory {
        #[command(subcommand)]
        what: TheoryCommand,
    },
    /// Run a Monte Carlo experiment from a JSON ExperimentSpec.
    Experiment {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 uses every available core.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Overrides the spec's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Empirical P(|â - a| > eps) over a grid of series lengths.
    Probe {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        t_grid: Vec<usize>,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 5000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub panel: PathBuf,
    /// Sample-fraction exponent of the adaptive threshold (default 0.9).
    #[arg(long, conflicts_with = "delta")]
    pub epsilon: Option<f64>,
    /// Fixed threshold δ; bypasses adaptive selection.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Truncation order of the noisy estimator.
    #[arg(long, default_value_t = 10.0)]
    pub r: f64,
    /// Use the true coefficients stored in the sidecar (oracle mode).
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Subcommand)]
pub enum TheoryCommand {
    /// Tail constants κ, ν, τ, ρ, B, g1 and the memory parameter d.
    Constants {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unconditional autocovariance for t = 0..=tmax.
    Acf {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, default_value_t = 50)]
        tmax: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral density on λ = πj/npoints.
    Spectrum {
        #[command(flatten)]
        law: LawArgs,
        #[arg(long, default_value_t = 200)]
        npoints: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Admissible threshold and panel-length rates (JSON).
    Rates {
        #[arg(long)]
        beta: f64,
        /// Moment order p (> 2); omit for p = ∞.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct LawArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
}

#[derive(Debug, Serialize)]
pub struct EstimateOutput {
    pub estimate: EstimateResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdChoice>,
    pub level: f64,
    pub confidence_interval: (f64, f64),
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    // unlocked handles: progress reports come from worker threads
    run_cli_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_cli_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn output(path: Option<&Path>, stdout: &mut dyn Write, body: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            f.write_all(body)?;
            f.flush()?;
        }
        None => stdout.write_all(body)?,
    }
    Ok(())
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::Parameter(format!(
            "--{name} must lie in (0, 1), got {v}"
        )));
    }
    Ok(())
}

/// Estimate from a panel file, exactly as the in-memory pipeline would.
pub fn estimate_from_file(
    args: &EstimateArgs,
) -> Result<(EstimateResult, Option<ThresholdChoice>)> {
    if let Some(e) = args.epsilon {
        if !(e > 0.0 && e <= 1.0) {
            return Err(Error::Parameter(format!(
                "--epsilon must lie in (0, 1], got {e}"
            )));
        }
    }
    if let Some(d) = args.delta {
        check_unit("delta", d)?;
    }
    if !(args.r > 1.0) {
        return Err(Error::Parameter(format!("--r must be > 1, got {}", args.r)));
    }
    let cols = io::load_panel_columns(&args.panel)?;
    let values: Vec<f64> = if args.exact {
        let meta: PanelMeta = io::load_sidecar(&args.panel)?
            .ok_or_else(|| Error::Format("--exact needs the panel's sidecar JSON".into()))?;
        let truth = meta.true_coeffs.ok_or_else(|| {
            Error::Format("sidecar holds no true coefficients (simulate with --keep-truth)".into())
        })?;
        if truth.len() != cols.n_series() {
            return Err(Error::Format(
                "sidecar coefficient count does not match the panel".into(),
            ));
        }
        truth
    } else {
        cols.series
            .iter()
            .map(|s| lag1_autocorr(s))
            .collect::<Result<_>>()?
    };
    let (delta, choice) = match args.delta {
        Some(d) => (d, None),
        None => {
            let c = adaptive_delta(&values, args.epsilon.unwrap_or(0.9))?;
            (c.delta, Some(c))
        }
    };
    let est = if args.exact {
        tailest::tail_index_gs(&values, delta)?
    } else {
        tailest::tail_index_noisy(&values, delta, args.r)?
    };
    Ok((est, choice))
}

fn execute(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Simulate {
            config,
            out,
            keep_truth,
        } => {
            let cfg: PanelConfig = io::read_json(&config)?;
            let panel = simulate_panel(&cfg, keep_truth)?;
            io::save_panel(&panel, &out)?;
            writeln!(
                stderr,
                "wrote {} series of length {} to {}",
                cfg.n_series,
                cfg.series_len,
                out.display()
            )?;
        }
        Command::Estimate { est, level, out } => {
            check_unit("level", level)?;
            let (estimate, threshold) = estimate_from_file(&est)?;
            let ci = tailest::confidence_interval(&estimate, level)?;
            let body = json_bytes(&EstimateOutput {
                estimate,
                threshold,
                level,
                confidence_interval: ci,
            })?;
            output(out.as_deref(), stdout, &body)?;
        }
        Command::Test { est, omega, out } => {
            check_unit("omega", omega)?;
            let (estimate, _) = estimate_from_file(&est)?;
            let t: TestResult = tailest::long_memory_test(&estimate, omega)?;
            output(out.as_deref(), stdout, &json_bytes(&t)?)?;
        }
        Command::Theory { what } => theory_command(what, stdout)?,
        Command::Experiment {
            spec,
            out,
            threads,
            seed,
        } => {
            let mut spec: ExperimentSpec = io::read_json(&spec)?;
            if let Some(s) = seed {
                spec.master_seed = s;
            }
            let progress = |s: usize, total: usize| eprintln!("scenario {}/{} done", s + 1, total);
            let report = mc::run_experiment_with_progress(&spec, threads, Some(&progress))?;
            let f = BufWriter::new(File::create(&out)?);
            mc::write_report_csv(&report.rows, f)?;
            io::write_json(&out.with_extension("meta.json"), &report.meta)?;
            writeln!(
                stderr,
                "wrote {} rows to {}",
                report.rows.len(),
                out.display()
            )?;
        }
        Command::Probe {
            alpha,
            beta,
            t_grid,
            eps,
            reps,
            seed,
            out,
        } => {
            let pts = mc::noise_probe(alpha, beta, &t_grid, eps, reps, seed)?;
            let mut body = String::from("T,probability,std_error\n");
            for p in pts {
                body.push_str(&format!(
                    "{},{},{}\n",
                    p.series_len, p.probability, p.std_error
                ));
            }
            output(out.as_deref(), stdout, body.as_bytes())?;
        }
    }
    Ok(())
}

fn theory_command(what: TheoryCommand, stdout: &mut dyn Write) -> Result<()> {
    match what {
        TheoryCommand::Constants { law, out } => {
            let tc = theory::beta_model_constants(law.alpha, law.beta)?;
            let rows = [
                ("kappa", tc.kappa),
                ("nu", tc.nu),
                ("tau", tc.tau),
                ("rho", tc.rho),
                ("b_const", tc.b_const),
                ("g1", tc.g1),
                ("d", 1.0 - law.beta / 2.0),
            ];
            let mut body = String::from("quantity,value\n");
            for (k, v) in rows {
                body.push_str(&format!("{k},{v}\n"));
            }
            output(out.as_deref(), stdout, body.as_bytes())
        }
        TheoryCommand::Acf { law, tmax, out } => {
            let mut body = String::from("t,autocovariance\n");
            for t in 0..=tmax {
                body.push_str(&format!(
                    "{t},{}\n",
                    theory::autocovariance(law.alpha, law.beta, t)?
                ));
            }
            output(out.as_deref(), stdout, body.as_bytes())
        }
        TheoryCommand::Spectrum { law, npoints, out } => {
            if npoints == 0 {
                return Err(Error::Parameter("--npoints must be >= 1".into()));
            }
            let first = if law.beta > 2.0 { 0 } else { 1 };
            let mut body = String::from("lambda,spectral_density\n");
            for j in first..=npoints {
                let lam = PI * j as f64 / npoints as f64;
                body.push_str(&format!(
                    "{lam},{}\n",
                    theory::spectral_density(law.alpha, law.beta, lam)?
                ));
            }
            output(out.as_deref(), stdout, body.as_bytes())
        }
        TheoryCommand::Rates { beta, p, b } => {
            let report = theory::rate_planner(beta, p, b)?;
            output(None, stdout, &json_bytes(&report)?)
        }
    }
}
