//! The four workflows. Each returns a typed report plus any curve files to
//! write; the caller decides where the report goes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use pfd_core::estimation::estimate_all;
use pfd_core::montecarlo::simulate_system;
use pfd_core::pfd::{self, regime_warning, Method};
use pfd_core::schedule::optimize_schedule;
use pfd_core::units::hours_to_months;
use pfd_core::{CurvePoint, EstimationResult, SimConfig, SolverTrace, SystemSpec, TestPolicy};
use serde::{Deserialize, Serialize};

use crate::config::{ConfigError, RunConfig};
use crate::sil::{classify_sil, SilBand, Thresholds};

/// Curve samples per interval when a simulated curve is requested but the
/// config does not say how many.
pub const DEFAULT_SIM_CURVE_SAMPLES: usize = 20;

/// Command-line switches shared by the workflows.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub curve: Option<PathBuf>,
    pub approx: bool,
    pub then_evaluate: bool,
    pub seed: Option<u64>,
    pub replications: Option<u64>,
    pub level: Option<f64>,
}

impl Options {
    fn curve_path(&self, config: &RunConfig) -> Option<PathBuf> {
        self.curve
            .clone()
            .or_else(|| config.output.as_ref().and_then(|o| o.curve.clone()))
    }
}

/// A CSV file to be written next to the report.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFile {
    pub path: PathBuf,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateReport {
    pub pfd_avg: f64,
    pub pfd_per_interval: Vec<f64>,
    pub u_max: f64,
    pub t_u_max: f64,
    pub sil_band: SilBand,
    pub below_scale: bool,
    pub approximation_used: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub level: f64,
    #[serde(flatten)]
    pub estimates: EstimationResult,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub evaluation: Option<EvaluateReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub optimal_times_hours: Vec<f64>,
    pub optimal_times_months: Vec<f64>,
    pub tau: f64,
    pub pfd_avg_opt: f64,
    pub pfd_avg_baseline: f64,
    pub pfd_reduction: f64,
    pub u_max_opt: f64,
    pub u_max_baseline: f64,
    pub u_max_reduction: f64,
    pub solver_trace: SolverTrace,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub pfd_avg_hat: f64,
    pub std_err: f64,
    pub replications: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub u_curve_hat: Vec<pfd_core::montecarlo::CurveEstimate>,
}

/// `t_hours,unavailability` rows in shortest round-trip decimal form.
pub fn curve_csv(points: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut out = String::from("t_hours,unavailability\n");
    for (t, u) in points {
        let _ = writeln!(out, "{t},{u}");
    }
    out
}

fn report_curve(curve: &[CurvePoint]) -> String {
    curve_csv(curve.iter().map(|p| (p.t_hours, p.unavailability)))
}

/// `dir/name.csv` -> `dir/name.baseline.csv`.
pub fn baseline_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.baseline.{}", ext.to_string_lossy()),
        None => format!("{stem}.baseline"),
    };
    path.with_file_name(name)
}

fn evaluate_policy(
    config: &RunConfig,
    spec: &SystemSpec,
    policy: &TestPolicy,
    approx: bool,
    curve: Option<&Path>,
) -> Result<(EvaluateReport, Vec<CurveFile>)> {
    let thresholds = Thresholds::resolve(config.sil_thresholds.as_deref())?;
    let points = config.curve_points()?;
    let method = if approx {
        Method::Approximate
    } else {
        Method::Exact
    };
    let report =
        pfd::evaluate(spec, policy, method, points).context("evaluating the test policy")?;
    let mut warnings = Vec::new();
    if approx {
        if let Some(w) = regime_warning(spec, policy.tau()) {
            warnings.push(w.to_string());
        }
    }
    let class = classify_sil(report.pfd_avg, &thresholds);
    let files = curve
        .map(|path| CurveFile {
            path: path.to_path_buf(),
            contents: report_curve(&report.curve),
        })
        .into_iter()
        .collect();
    Ok((
        EvaluateReport {
            pfd_avg: report.pfd_avg,
            pfd_per_interval: report.pfd_per_interval,
            u_max: report.u_max,
            t_u_max: report.t_u_max,
            sil_band: class.band,
            below_scale: class.below_scale,
            approximation_used: approx,
            warnings,
        },
        files,
    ))
}

pub fn evaluate(config: &RunConfig, opts: &Options) -> Result<(EvaluateReport, Vec<CurveFile>)> {
    let spec = config.system_spec()?;
    let policy = config.test_policy()?;
    evaluate_policy(
        config,
        &spec,
        &policy,
        opts.approx,
        opts.curve_path(config).as_deref(),
    )
}

pub fn estimate(config: &RunConfig, opts: &Options) -> Result<(EstimateReport, Vec<CurveFile>)> {
    let level = config.estimation_level(opts.level)?;
    let obs = config.observation_set()?;
    let estimates = estimate_all(&obs, level).context("estimating failure rate and efficiency")?;
    let mut files = Vec::new();
    let evaluation = if opts.then_evaluate {
        let e = estimates.e_hat.ok_or_else(|| {
            ConfigError::new(
                "observations",
                "the efficiency cannot be estimated from these counts, so there is nothing to evaluate",
            )
        })?;
        let spec = config.system_spec_with(estimates.lambda_hat)?;
        let policy =
            TestPolicy::new(e, config.schedule()?).context("building the estimated policy")?;
        let (report, curves) = evaluate_policy(
            config,
            &spec,
            &policy,
            opts.approx,
            opts.curve_path(config).as_deref(),
        )?;
        files = curves;
        Some(report)
    } else {
        None
    };
    Ok((
        EstimateReport {
            level,
            estimates,
            evaluation,
        },
        files,
    ))
}

pub fn optimize(config: &RunConfig, opts: &Options) -> Result<(OptimizeReport, Vec<CurveFile>)> {
    let spec = config.system_spec()?;
    let efficiency = config.efficiency()?;
    let (n_tests, tau, settings) = config.optimize_problem()?;
    let result = optimize_schedule(&spec, efficiency, n_tests, tau, &settings)
        .context("optimizing the partial-test schedule")?;
    let mut files = Vec::new();
    if let Some(path) = opts.curve_path(config) {
        let points = config.curve_points()?;
        let optimal = result.policy(efficiency)?;
        let baseline = TestPolicy::periodic(efficiency, n_tests, tau)?;
        files.push(CurveFile {
            contents: report_curve(&pfd::sample_curve(&spec, &optimal, points)?),
            path: path.clone(),
        });
        files.push(CurveFile {
            contents: report_curve(&pfd::sample_curve(&spec, &baseline, points)?),
            path: baseline_path(&path),
        });
    }
    Ok((
        OptimizeReport {
            optimal_times_months: result
                .optimal_times
                .iter()
                .map(|&h| hours_to_months(h))
                .collect(),
            optimal_times_hours: result.optimal_times,
            tau: result.tau,
            pfd_avg_opt: result.pfd_avg_opt,
            pfd_avg_baseline: result.pfd_avg_baseline,
            pfd_reduction: result.pfd_reduction,
            u_max_opt: result.u_max_opt,
            u_max_baseline: result.u_max_baseline,
            u_max_reduction: result.u_max_reduction,
            solver_trace: result.solver_trace,
            warning: result.warning,
        },
        files,
    ))
}

pub fn simulate(config: &RunConfig, opts: &Options) -> Result<(SimulateReport, Vec<CurveFile>)> {
    let spec = config.system_spec()?;
    let policy = config.test_policy()?;
    let (replications, seed, mut curve_samples) =
        config.simulation_settings(opts.replications, opts.seed)?;
    let curve = opts.curve_path(config);
    if curve.is_some() && curve_samples == 0 {
        curve_samples = DEFAULT_SIM_CURVE_SAMPLES;
    }
    let result = simulate_system(&SimConfig {
        spec,
        policy,
        replications,
        seed,
        curve_samples,
    })
    .context("running the simulation")?;
    let files = curve
        .map(|path| CurveFile {
            path,
            contents: curve_csv(
                result
                    .u_curve_hat
                    .iter()
                    .map(|p| (p.t_hours, p.unavailability)),
            ),
        })
        .into_iter()
        .collect();
    Ok((
        SimulateReport {
            pfd_avg_hat: result.pfd_avg_hat,
            std_err: result.std_err,
            replications: result.replications,
            seed: result.seed,
            u_curve_hat: result.u_curve_hat,
        },
        files,
    ))
}
