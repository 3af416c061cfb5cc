//! Exact availability and PFD under partial and full proof tests.
//!
//! Interval `i` (0-based) runs from `t_start = schedule.start(i)` to
//! `t_end = schedule.end(i)`. Inside it each component is available with
//! probability `exp(-lambda * (t - E * t_start))`: the partial test at
//! `t_start` has renewed the detectable share `E` of the hazard while the
//! remaining share has been accumulating since the last full test.

use crate::error::{Error, Result};
use crate::model::{SystemSpec, TestPolicy};

use super::coefficients::{binomial, Coefficients, MAX_MOMENT_ORDER};

/// Relative error accepted from the alternating S-form before the moment
/// expansion is tried instead.
const S_FORM_TOLERANCE: f64 = 1e-13;

/// Below this argument `(1 - e^-a) / a` is replaced by `1 - a/2`.
const SMALL_ARGUMENT: f64 = 1e-8;

/// `(1 - e^-a) / a`, the mean of `e^-s` over `s in [0, a]`.
pub(crate) fn mean_exp_factor(a: f64) -> f64 {
    if a < SMALL_ARGUMENT {
        1.0 - 0.5 * a
    } else {
        -(-a).exp_m1() / a
    }
}

/// `1 - (1 - e^-a) / a` without cancellation for small `a`.
fn mean_exp_complement(a: f64) -> f64 {
    if a < 0.05 {
        // a/2 - a^2/6 + a^3/24 - ...
        let mut term = 1.0;
        let mut sum = 0.0;
        for l in 1..=12 {
            term *= -a / (l + 1) as f64;
            sum -= term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        1.0 - mean_exp_factor(a)
    }
}

/// Hazard exposure `lambda * (t - E * t_start)` of one component at time `t`
/// of the interval starting at `t_start`.
#[inline]
fn exposure(spec: &SystemSpec, policy: &TestPolicy, t_start: f64, t: f64) -> f64 {
    spec.lambda() * (t - policy.efficiency() * t_start)
}

/// Component availability `e^{E lambda t_{i-1}} e^{-lambda t}`.
pub fn component_availability(spec: &SystemSpec, policy: &TestPolicy, t: f64) -> Result<f64> {
    let i = policy.schedule().locate(t)?;
    Ok(component_availability_in(spec, policy, i, t))
}

/// Component availability with the formula of interval `i`, valid on the
/// closed interval; `t = t_start` gives the value just after the test.
pub fn component_availability_in(spec: &SystemSpec, policy: &TestPolicy, i: usize, t: f64) -> f64 {
    let t_start = policy.schedule().start(i);
    (-exposure(spec, policy, t_start, t)).exp()
}

/// MooN availability from the S-coefficient sum.
pub fn system_availability(spec: &SystemSpec, policy: &TestPolicy, t: f64) -> Result<f64> {
    let i = policy.schedule().locate(t)?;
    Ok(system_availability_in(spec, policy, i, t))
}

/// [`system_availability`] using the formula of interval `i`.
pub fn system_availability_in(spec: &SystemSpec, policy: &TestPolicy, i: usize, t: f64) -> f64 {
    let coeffs = Coefficients::new(spec.m(), spec.n_components());
    let z = exposure(spec, policy, policy.schedule().start(i), t);
    let a: f64 = coeffs
        .terms
        .iter()
        .map(|&(x, s)| s * (-(x as f64) * z).exp())
        .sum();
    a.clamp(0.0, 1.0)
}

/// `1 - system_availability`.
pub fn system_unavailability(spec: &SystemSpec, policy: &TestPolicy, t: f64) -> Result<f64> {
    Ok(1.0 - system_availability(spec, policy, t)?)
}

pub fn system_unavailability_in(spec: &SystemSpec, policy: &TestPolicy, i: usize, t: f64) -> f64 {
    1.0 - system_availability_in(spec, policy, i, t)
}

/// MooN availability as the binomial probability that at least M of N
/// independent components are up. Independent of the S-coefficient route.
pub fn system_availability_direct(spec: &SystemSpec, policy: &TestPolicy, t: f64) -> Result<f64> {
    let i = policy.schedule().locate(t)?;
    let z = exposure(spec, policy, policy.schedule().start(i), t);
    let up = (-z).exp();
    let down = -(-z).exp_m1();
    let n = spec.n_components();
    Ok((spec.m()..=n)
        .map(|k| binomial(n, k) as f64 * up.powi(k as i32) * down.powi((n - k) as i32))
        .sum())
}

/// Unavailability as the binomial probability that more than N - M
/// components are down. All terms are positive, so the result keeps full
/// relative precision even when it is tiny.
pub fn system_unavailability_direct(spec: &SystemSpec, policy: &TestPolicy, t: f64) -> Result<f64> {
    let i = policy.schedule().locate(t)?;
    Ok(system_unavailability_direct_in(spec, policy, i, t))
}

pub fn system_unavailability_direct_in(
    spec: &SystemSpec,
    policy: &TestPolicy,
    i: usize,
    t: f64,
) -> f64 {
    let z = exposure(spec, policy, policy.schedule().start(i), t);
    let up = (-z).exp();
    let down = -(-z).exp_m1();
    let n = spec.n_components();
    (spec.failures_to_defeat()..=n)
        .map(|j| binomial(n, j) as f64 * down.powi(j as i32) * up.powi((n - j) as i32))
        .sum()
}

/// Mean unavailability PFD_i over interval `i` (0-based).
pub fn pfd_interval(spec: &SystemSpec, policy: &TestPolicy, i: usize) -> Result<f64> {
    let schedule = policy.schedule();
    schedule.check_index(i)?;
    let coeffs = Coefficients::new(spec.m(), spec.n_components());
    Ok(interval_pfd(&coeffs, spec, policy, i))
}

fn interval_pfd(coeffs: &Coefficients, spec: &SystemSpec, policy: &TestPolicy, i: usize) -> f64 {
    let schedule = policy.schedule();
    let aged = (1.0 - policy.efficiency()) * spec.lambda() * schedule.start(i);
    let span = spec.lambda() * schedule.interval(i);
    mean_unavailability(coeffs, aged, span)
}

/// PFD_i for every interval.
pub fn pfd_per_interval(spec: &SystemSpec, policy: &TestPolicy) -> Vec<f64> {
    let coeffs = Coefficients::new(spec.m(), spec.n_components());
    (0..policy.n_tests())
        .map(|i| interval_pfd(&coeffs, spec, policy, i))
        .collect()
}

/// Average PFD over the full-test cycle, the T_i-weighted mean of PFD_i.
pub fn pfd_avg(spec: &SystemSpec, policy: &TestPolicy) -> f64 {
    let schedule = policy.schedule();
    let weighted: f64 = pfd_per_interval(spec, policy)
        .iter()
        .zip(schedule.intervals())
        .map(|(p, t)| p * t)
        .sum();
    (weighted / schedule.tau()).clamp(0.0, 1.0)
}

/// PFDavg of a policy with the full test only.
pub fn pfd_avg_no_partial(spec: &SystemSpec, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::invalid(format!(
            "full-test interval must be positive, got {tau}"
        )));
    }
    let coeffs = Coefficients::new(spec.m(), spec.n_components());
    Ok(mean_unavailability(&coeffs, 0.0, spec.lambda() * tau))
}

/// `1 - sum_x S_x e^{-x aged} (1 - e^{-x span}) / (x span)`.
///
/// `aged` is the undetected hazard `(1-E) lambda t_start` carried into the
/// interval and `span = lambda T`. The alternating S-form loses every digit
/// once the result drops below roughly `eps * sum |S_x|`; in that regime the
/// same quantity is summed as a power series in the hazards, whose
/// coefficients are the exactly computed moments `sum_x S_x x^k`.
pub(crate) fn mean_unavailability(coeffs: &Coefficients, aged: f64, span: f64) -> f64 {
    if span == 0.0 {
        return 0.0;
    }
    let (s_form, s_err) = s_form_sum(coeffs, aged, span);
    if s_form > 0.0 && s_err <= S_FORM_TOLERANCE * s_form {
        return s_form.min(1.0);
    }
    let best = match moment_series(coeffs, aged, span) {
        Some((series, series_err)) if series_err < s_err => series,
        _ => s_form,
    };
    best.clamp(0.0, 1.0)
}

/// Sum of `S_x (1 - e^{-x aged} phi(x span))` with a rounding-error bound.
fn s_form_sum(coeffs: &Coefficients, aged: f64, span: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    for &(x, s) in &coeffs.terms {
        let x = x as f64;
        let decay = (-x * aged).exp();
        let w = -(-x * aged).exp_m1() + decay * mean_exp_complement(x * span);
        sum += s * w;
        magnitude += (s * w).abs();
    }
    (sum, 8.0 * f64::EPSILON * magnitude)
}

/// Power-series evaluation in `aged` and `span`:
/// `sum_{k >= r} (-1)^{k+1} mu_k e_k`, with
/// `e_k = sum_{j=0}^{k} aged^j / j! * span^(k-j) / (k-j+1)!`.
fn moment_series(coeffs: &Coefficients, aged: f64, span: f64) -> Option<(f64, f64)> {
    let scale = coeffs.n as f64 * (aged + span);
    if scale > 24.0 {
        return None;
    }
    let mu = coeffs.moments();
    let first = (coeffs.n - coeffs.m + 1) as usize;

    // aged^j / j! and span^l / (l+1)!
    let mut aged_pow = Vec::with_capacity(MAX_MOMENT_ORDER + 1);
    let mut span_pow = Vec::with_capacity(MAX_MOMENT_ORDER + 1);
    let (mut a, mut b) = (1.0, 1.0);
    for j in 0..=MAX_MOMENT_ORDER {
        aged_pow.push(a);
        span_pow.push(b);
        a *= aged / (j + 1) as f64;
        b *= span / (j + 2) as f64;
    }

    let mut sum = 0.0;
    let mut magnitude = 0.0;
    let mut converged = false;
    for k in first..=MAX_MOMENT_ORDER {
        let e_k: f64 = (0..=k).map(|j| aged_pow[j] * span_pow[k - j]).sum();
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        let term = sign * mu[k] * e_k;
        if !term.is_finite() {
            return None;
        }
        sum += term;
        magnitude += term.abs();
        if k > first + 1 && (k as f64) > 2.0 * scale && term.abs() <= 1e-18 * sum.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    Some((sum, 8.0 * f64::EPSILON * magnitude))
}
