//! First-order (small lambda*tau) approximations of the exact forms.
//!
//! These are only meaningful while `lambda * tau` stays well below 1e-2; every
//! function logs a warning outside that regime but still returns the value.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{SystemSpec, TestPolicy};

use super::coefficients::binomial;

/// Upper end of the `lambda * tau` range where the approximations apply.
pub const APPROXIMATION_LIMIT: f64 = 1e-2;

/// Diagnostic raised when an approximation is used outside its regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeWarning {
    pub lambda_tau: f64,
    pub limit: f64,
}

impl std::fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "lambda*tau = {} exceeds {}; first-order approximation is unreliable",
            self.lambda_tau, self.limit
        )
    }
}

pub fn regime_warning(spec: &SystemSpec, tau: f64) -> Option<RegimeWarning> {
    let lambda_tau = spec.lambda() * tau;
    (lambda_tau > APPROXIMATION_LIMIT).then_some(RegimeWarning {
        lambda_tau,
        limit: APPROXIMATION_LIMIT,
    })
}

fn warn_outside_regime(spec: &SystemSpec, tau: f64) {
    if let Some(w) = regime_warning(spec, tau) {
        log::warn!("{w}");
    }
}

/// `1 + E lambda t_{i-1} - lambda t`.
pub fn component_availability_approx(
    spec: &SystemSpec,
    policy: &TestPolicy,
    t: f64,
) -> Result<f64> {
    warn_outside_regime(spec, policy.tau());
    let t_start = policy.schedule().start(policy.schedule().locate(t)?);
    Ok(1.0 + policy.efficiency() * spec.lambda() * t_start - spec.lambda() * t)
}

/// `1 - C(N, M-1) (lambda (t - E t_{i-1}))^(N-M+1)`.
pub fn system_availability_approx(spec: &SystemSpec, policy: &TestPolicy, t: f64) -> Result<f64> {
    warn_outside_regime(spec, policy.tau());
    let i = policy.schedule().locate(t)?;
    Ok(1.0 - system_unavailability_approx_in(spec, policy, i, t))
}

pub(crate) fn system_unavailability_approx_in(
    spec: &SystemSpec,
    policy: &TestPolicy,
    i: usize,
    t: f64,
) -> f64 {
    let r = spec.failures_to_defeat() as i32;
    let t_start = policy.schedule().start(i);
    let c = binomial(spec.n_components(), spec.m() - 1) as f64;
    c * (spec.lambda() * (t - policy.efficiency() * t_start)).powi(r)
}

/// Per-interval contribution `T_i * PFD_i` of the approximate form.
fn weighted_interval(spec: &SystemSpec, policy: &TestPolicy, i: usize) -> f64 {
    let schedule = policy.schedule();
    let e = policy.efficiency();
    let r = spec.failures_to_defeat() as i32;
    let lambda = spec.lambda();
    let (t_start, t_end) = (schedule.start(i), schedule.end(i));
    let c = binomial(spec.n_components(), spec.m() - 1) as f64;
    // lambda^(r) * (...)^(r+1) / (r+1), kept as (lambda s)^(r+1) / lambda
    let hi = (lambda * (t_end - e * t_start)).powi(r + 1);
    let lo = (lambda * t_start * (1.0 - e)).powi(r + 1);
    if lambda == 0.0 {
        return 0.0;
    }
    c * (hi - lo) / ((r + 1) as f64 * lambda)
}

pub fn pfd_interval_approx(spec: &SystemSpec, policy: &TestPolicy, i: usize) -> Result<f64> {
    policy.schedule().check_index(i)?;
    warn_outside_regime(spec, policy.tau());
    Ok(weighted_interval(spec, policy, i) / policy.schedule().interval(i))
}

pub fn pfd_avg_approx(spec: &SystemSpec, policy: &TestPolicy) -> f64 {
    warn_outside_regime(spec, policy.tau());
    let total: f64 = (0..policy.n_tests())
        .map(|i| weighted_interval(spec, policy, i))
        .sum();
    total / policy.tau()
}

/// `C(N, M-1) (lambda tau)^(N-M+1) / (N-M+2)`.
pub fn pfd_avg_no_partial_approx(spec: &SystemSpec, tau: f64) -> f64 {
    warn_outside_regime(spec, tau);
    let r = spec.failures_to_defeat() as i32;
    binomial(spec.n_components(), spec.m() - 1) as f64 * (spec.lambda() * tau).powi(r)
        / (r + 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pfd::exact;

    #[test]
    fn simple_values() {
        let spec = SystemSpec::new(1, 1, 1e-5).unwrap();
        let policy = TestPolicy::from_times(0.0, vec![100.0, 200.0]).unwrap();
        assert_eq!(
            component_availability_approx(&spec, &policy, 0.0).unwrap(),
            1.0
        );
        let v = component_availability_approx(&spec, &policy, 100.0).unwrap();
        assert!((v - 0.999).abs() < 1e-15);
        assert_eq!(
            system_availability_approx(&spec, &policy, 0.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn one_out_of_one_substitution() {
        let spec = SystemSpec::new(1, 1, 2e-6).unwrap();
        let policy = TestPolicy::from_times(0.7, vec![300.0, 1000.0]).unwrap();
        for t in [50.0, 300.0, 301.0, 900.0] {
            let i = policy.schedule().locate(t).unwrap();
            let t_start = policy.schedule().start(i);
            let expected = 1.0 - 2e-6 * (t - 0.7 * t_start);
            let v = system_availability_approx(&spec, &policy, t).unwrap();
            assert!((v - expected).abs() < 1e-15);
        }
        let p = pfd_avg_approx(&spec, &TestPolicy::from_times(0.7, vec![1000.0]).unwrap());
        assert!((p - 2e-6 * 1000.0 / 2.0).abs() < 1e-18);
    }

    #[test]
    fn one_out_of_two_single_interval() {
        let spec = SystemSpec::new(1, 2, 1e-5).unwrap();
        let policy = TestPolicy::from_times(0.5, vec![1000.0]).unwrap();
        let lt: f64 = 1e-2;
        let expected = lt * lt / 3.0;
        assert!((pfd_avg_approx(&spec, &policy) - expected).abs() < 1e-18);
        assert!((pfd_avg_no_partial_approx(&spec, 1000.0) - expected).abs() < 1e-18);
    }

    #[test]
    fn interval_weights_average() {
        let spec = SystemSpec::new(2, 3, 1e-6).unwrap();
        let policy = TestPolicy::from_times(0.4, vec![1000.0, 2500.0, 4000.0]).unwrap();
        let s = policy.schedule();
        let weighted: f64 = (0..3)
            .map(|i| pfd_interval_approx(&spec, &policy, i).unwrap() * s.interval(i))
            .sum();
        assert!((weighted / s.tau() - pfd_avg_approx(&spec, &policy)).abs() < 1e-20);
        assert!(pfd_interval_approx(&spec, &policy, 3).is_err());
    }

    #[test]
    fn component_relative_error_small_in_regime() {
        // lambda*tau = 1e-3
        let spec = SystemSpec::new(1, 1, 1e-7).unwrap();
        let policy = TestPolicy::from_times(0.5, vec![2500.0, 5000.0, 7500.0, 10000.0]).unwrap();
        for j in 0..=100 {
            let t = 100.0 * j as f64;
            let exact = exact::component_availability(&spec, &policy, t).unwrap();
            let approx = component_availability_approx(&spec, &policy, t).unwrap();
            assert!(((approx - exact) / exact).abs() <= 1e-4);
        }
    }

    #[test]
    fn regime_flag() {
        let spec = SystemSpec::new(2, 6, 6.1e-5).unwrap();
        assert!(regime_warning(&spec, 8760.0).is_some());
        assert!(regime_warning(&spec, 100.0).is_none());
    }
}
