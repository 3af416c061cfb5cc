//! Placement of partial tests inside the full-test interval.
//!
//! The decision variables are the gaps between consecutive tests. With `n`
//! tests the first `n - 1` gaps are free, non-negative and sum to at most
//! `tau`; the last gap closes the cycle. Candidates are scored by PFDavg.
//!
//! Search runs in two phases:
//! 1. nested grids: a lattice over the whole gap simplex, then boxes of
//!    shrinking width around the incumbent,
//! 2. a Nelder-Mead polish started from the grid optimum, with every trial
//!    point projected back onto the feasible gap set.
//!
//! Grid points are scored in parallel but the incumbent is chosen by index
//! order, so the result does not depend on thread scheduling.

mod simplex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_efficiency, Schedule, SystemSpec, TestPolicy};
use crate::pfd;

use simplex::SimplexOptions;

/// Most tests per cycle accepted by the optimiser (9 decision variables).
pub const MAX_TESTS: usize = 10;

/// A candidate must beat the incumbent by more than this to replace it.
const IMPROVEMENT_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    /// Number of nested grid levels before the simplex polish.
    pub grid_levels: usize,
    /// Upper bound on grid points per level.
    pub grid_budget: usize,
    /// Shift of the first-level lattice, as a fraction of one grid step.
    pub grid_offset: f64,
    pub max_iterations: usize,
    /// Objective spread (absolute) at which the simplex stops.
    pub f_tolerance: f64,
    /// Simplex diameter in hours at which it stops.
    pub x_tolerance_hours: f64,
    /// Samples per interval for the maximum-unavailability search.
    pub u_max_resolution: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            grid_levels: 3,
            grid_budget: 4096,
            grid_offset: 0.0,
            max_iterations: 10_000,
            f_tolerance: 1e-12,
            x_tolerance_hours: 0.01,
            u_max_resolution: pfd::MAX_SEARCH_RESOLUTION,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    pub grid_evaluations: usize,
    pub simplex_iterations: usize,
    pub simplex_evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    /// Optimal partial-test instants t_1* ..= t_{n-1}*, hours.
    pub optimal_times: Vec<f64>,
    pub tau: f64,
    pub pfd_avg_opt: f64,
    pub pfd_avg_baseline: f64,
    pub pfd_reduction: f64,
    pub u_max_opt: f64,
    pub u_max_baseline: f64,
    pub u_max_reduction: f64,
    pub solver_trace: SolverTrace,
    /// Set when the simplex hit its iteration cap; the result is the best
    /// point found.
    pub warning: Option<String>,
}

impl OptimizationResult {
    /// Test policy realising the optimum (coincident tests merged).
    pub fn policy(&self, efficiency: f64) -> Result<TestPolicy> {
        TestPolicy::new(efficiency, merged_schedule(&self.optimal_times, self.tau)?)
    }

    /// Optimal gaps T_1* ..= T_n*, hours.
    pub fn optimal_intervals(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.optimal_times
            .iter()
            .chain(std::iter::once(&self.tau))
            .map(|&t| {
                let g = t - prev;
                prev = t;
                g
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyComparison {
    pub pfd_avg_baseline: f64,
    pub pfd_avg_candidate: f64,
    pub pfd_reduction: f64,
    pub u_max_baseline: f64,
    pub u_max_candidate: f64,
    pub u_max_reduction: f64,
}

/// `(baseline - candidate) / baseline`, zero for a zero baseline.
pub fn relative_reduction(baseline: f64, candidate: f64) -> f64 {
    if baseline == 0.0 {
        0.0
    } else {
        (baseline - candidate) / baseline
    }
}

/// Schedule from sorted partial-test instants: tests closer than a tiny
/// tolerance are merged, a test at 0 is dropped and one at `tau` joins the
/// full test.
fn merged_schedule(partials: &[f64], tau: f64) -> Result<Schedule> {
    let eps = 1e-9 * tau;
    let mut times = Vec::with_capacity(partials.len() + 1);
    let mut prev = 0.0;
    for &t in partials {
        if t - prev > eps && tau - t > eps {
            times.push(t);
            prev = t;
        }
    }
    times.push(tau);
    Schedule::new(times)
}

/// PFDavg of the policy induced by `times` (sorted, within `[0, tau]`).
pub fn objective(spec: &SystemSpec, efficiency: f64, times: &[f64], tau: f64) -> Result<f64> {
    check_efficiency(efficiency)?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::invalid(format!("tau must be positive, got {tau}")));
    }
    if times.iter().any(|t| !(0.0..=tau).contains(t)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid(
            "candidate test times must be sorted and lie within [0, tau]",
        ));
    }
    let policy = TestPolicy::new(efficiency, merged_schedule(times, tau)?)?;
    Ok(pfd::pfd_avg(spec, &policy))
}

/// Euclidean projection onto `{g >= 0, sum g <= tau}`.
fn project_gaps(gaps: &[f64], tau: f64) -> Vec<f64> {
    let clipped: Vec<f64> = gaps.iter().map(|g| g.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= tau {
        return clipped;
    }
    // projection onto the simplex sum g = tau, g >= 0
    let mut sorted = gaps.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (j, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let candidate = (cumulative - tau) / (j + 1) as f64;
        if v - candidate > 0.0 {
            shift = candidate;
        }
    }
    gaps.iter().map(|g| (g - shift).max(0.0)).collect()
}

fn gaps_to_times(gaps: &[f64], tau: f64) -> Vec<f64> {
    let mut t = 0.0;
    gaps.iter()
        .map(|g| {
            t += g;
            t.min(tau)
        })
        .collect()
}

struct Problem<'a> {
    spec: &'a SystemSpec,
    efficiency: f64,
    tau: f64,
}

impl Problem<'_> {
    fn score(&self, gaps: &[f64]) -> f64 {
        let times = gaps_to_times(&project_gaps(gaps, self.tau), self.tau);
        objective(self.spec, self.efficiency, &times, self.tau)
            .expect("projected gaps are always feasible")
    }

    /// Score all candidates in parallel; return the first index attaining
    /// a strict improvement over `incumbent`.
    fn best_of(&self, candidates: &[Vec<f64>], incumbent: (Vec<f64>, f64)) -> (Vec<f64>, f64) {
        let scores: Vec<f64> = candidates.par_iter().map(|g| self.score(g)).collect();
        let mut best = incumbent;
        for (g, &f) in candidates.iter().zip(&scores) {
            if f < best.1 - IMPROVEMENT_THRESHOLD {
                best = (g.clone(), f);
            }
        }
        best
    }
}

fn binomial_usize(n: usize, k: usize) -> usize {
    pfd::binomial(n as u32, k as u32).min(usize::MAX as i128) as usize
}

/// Lattice of the first `dim` gaps: all compositions of `r` into `dim + 1`
/// non-negative parts, shifted by `offset` and scaled to `tau`.
fn simplex_lattice(dim: usize, r: usize, offset: f64, tau: f64) -> Vec<Vec<f64>> {
    let parts = dim + 1;
    let scale = tau / (r as f64 + parts as f64 * offset);
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(dim);
    fn recurse(
        current: &mut Vec<f64>,
        remaining: usize,
        dim: usize,
        offset: f64,
        scale: f64,
        out: &mut Vec<Vec<f64>>,
    ) {
        if current.len() == dim {
            out.push(current.clone());
            return;
        }
        for c in 0..=remaining {
            current.push((c as f64 + offset) * scale);
            recurse(current, remaining - c, dim, offset, scale, out);
            current.pop();
        }
    }
    recurse(&mut current, r, dim, offset, scale, &mut out);
    out
}

/// Box grid of `points` per axis with half-width `half` around `center`,
/// keeping feasible points only.
fn box_grid(center: &[f64], half: f64, points: usize, tau: f64) -> Vec<Vec<f64>> {
    let dim = center.len();
    let step = 2.0 * half / (points - 1) as f64;
    let total = points.pow(dim as u32);
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        let g: Vec<f64> = center
            .iter()
            .map(|c| {
                let j = rest % points;
                rest /= points;
                c - half + step * j as f64
            })
            .collect();
        if g.iter().all(|&v| v >= 0.0) && g.iter().sum::<f64>() <= tau {
            out.push(g);
        }
    }
    out
}

/// Minimise PFDavg over the instants of `n_tests - 1` partial tests placed
/// in `[0, tau]`, the full test closing the cycle at `tau`.
pub fn optimize_schedule(
    spec: &SystemSpec,
    efficiency: f64,
    n_tests: usize,
    tau: f64,
    settings: &SolverSettings,
) -> Result<OptimizationResult> {
    check_efficiency(efficiency)?;
    if n_tests == 0 || n_tests > MAX_TESTS {
        return Err(Error::invalid(format!(
            "number of tests must be in 1..={MAX_TESTS}, got {n_tests}"
        )));
    }
    if settings.grid_budget < 2 || !(0.0..1.0).contains(&settings.grid_offset) {
        return Err(Error::invalid(
            "solver settings need grid_budget >= 2 and grid_offset in [0, 1)",
        ));
    }
    let baseline = TestPolicy::periodic(efficiency, n_tests, tau)?;
    let f_baseline = pfd::pfd_avg(spec, &baseline);
    let dim = n_tests - 1;
    let problem = Problem {
        spec,
        efficiency,
        tau,
    };
    let mut trace = SolverTrace {
        converged: true,
        ..Default::default()
    };

    let mut best = (
        baseline
            .schedule()
            .intervals()
            .take(dim)
            .collect::<Vec<_>>(),
        f_baseline,
    );
    if dim > 0 {
        // level 1: whole feasible set
        let mut r = 1;
        while binomial_usize(r + 1 + dim, dim) <= settings.grid_budget {
            r += 1;
        }
        let lattice = simplex_lattice(dim, r, settings.grid_offset, tau);
        trace.grid_evaluations += lattice.len();
        best = problem.best_of(&lattice, best);
        let mut step = tau / r as f64;

        // finer levels: boxes around the incumbent
        let mut points = (settings.grid_budget as f64).powf(1.0 / dim as f64).floor() as usize;
        points = points.max(3);
        if points.is_multiple_of(2) {
            points -= 1;
        }
        for _ in 1..settings.grid_levels {
            let grid = box_grid(&best.0, step, points, tau);
            trace.grid_evaluations += grid.len();
            best = problem.best_of(&grid, best);
            step = 2.0 * step / (points - 1) as f64;
        }

        let outcome = simplex::minimize(
            |g| problem.score(g),
            &best.0,
            step,
            SimplexOptions {
                max_iterations: settings.max_iterations,
                f_tolerance: settings.f_tolerance,
                x_tolerance: settings.x_tolerance_hours,
            },
        );
        trace.simplex_iterations = outcome.iterations;
        trace.simplex_evaluations = outcome.evaluations;
        trace.converged = outcome.converged;
        let polished = project_gaps(&outcome.x, tau);
        let f_polished = problem.score(&polished);
        if f_polished < best.1 - IMPROVEMENT_THRESHOLD {
            best = (polished, f_polished);
        }
    }

    let optimal_times = gaps_to_times(&best.0, tau);
    let optimal = TestPolicy::new(efficiency, merged_schedule(&optimal_times, tau)?)?;
    let f_opt = pfd::pfd_avg(spec, &optimal);
    let (_, u_base) = pfd::max_unavailability(spec, &baseline, settings.u_max_resolution)?;
    let (_, u_opt) = pfd::max_unavailability(spec, &optimal, settings.u_max_resolution)?;
    let warning = (!trace.converged).then(|| {
        format!(
            "simplex stopped after {} iterations without meeting tolerances; \
             returning best point found",
            trace.simplex_iterations
        )
    });
    Ok(OptimizationResult {
        optimal_times,
        tau,
        pfd_avg_opt: f_opt,
        pfd_avg_baseline: f_baseline,
        pfd_reduction: relative_reduction(f_baseline, f_opt),
        u_max_opt: u_opt,
        u_max_baseline: u_base,
        u_max_reduction: relative_reduction(u_base, u_opt),
        solver_trace: trace,
        warning,
    })
}

/// PFDavg and maximum unavailability of two policies sharing `tau`.
pub fn compare_policies(
    spec: &SystemSpec,
    baseline: &TestPolicy,
    candidate: &TestPolicy,
) -> Result<PolicyComparison> {
    let (tb, tc) = (baseline.tau(), candidate.tau());
    if (tb - tc).abs() > 1e-9 * tb.max(tc) {
        return Err(Error::invalid(format!(
            "policies must share the full-test interval, got {tb} h and {tc} h"
        )));
    }
    let resolution = pfd::MAX_SEARCH_RESOLUTION;
    let pfd_b = pfd::pfd_avg(spec, baseline);
    let pfd_c = pfd::pfd_avg(spec, candidate);
    let (_, u_b) = pfd::max_unavailability(spec, baseline, resolution)?;
    let (_, u_c) = pfd::max_unavailability(spec, candidate, resolution)?;
    Ok(PolicyComparison {
        pfd_avg_baseline: pfd_b,
        pfd_avg_candidate: pfd_c,
        pfd_reduction: relative_reduction(pfd_b, pfd_c),
        u_max_baseline: u_b,
        u_max_candidate: u_c,
        u_max_reduction: relative_reduction(u_b, u_c),
    })
}
