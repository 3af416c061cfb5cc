//! Closed-form availability and PFD of MooN systems under a test policy.

mod approx;
mod coefficients;
mod curve;
mod exact;

pub use approx::{
    component_availability_approx, pfd_avg_approx, pfd_avg_no_partial_approx, pfd_interval_approx,
    regime_warning, system_availability_approx, RegimeWarning, APPROXIMATION_LIMIT,
};
pub use coefficients::{binomial, s_coefficient};
pub use curve::{max_unavailability, sample_curve, sample_instants, CurvePoint};
pub use exact::{
    component_availability, component_availability_in, pfd_avg, pfd_avg_no_partial, pfd_interval,
    pfd_per_interval, system_availability, system_availability_direct, system_availability_in,
    system_unavailability, system_unavailability_direct, system_unavailability_direct_in,
    system_unavailability_in,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{SystemSpec, TestPolicy};

/// Which family of formulas a report was computed with.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Exact,
    /// First-order expansion, valid for small lambda*tau.
    Approximate,
}

/// Samples per interval used when locating the maximum unavailability.
pub const MAX_SEARCH_RESOLUTION: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PfdReport {
    pub pfd_per_interval: Vec<f64>,
    pub pfd_avg: f64,
    pub u_max: f64,
    /// Test instant whose left limit attains `u_max`.
    pub t_u_max: f64,
    pub curve: Vec<CurvePoint>,
}

/// Full evaluation of a policy: PFD_i, PFDavg, maximum unavailability and a
/// sampled curve with `points_per_interval` points per interval.
pub fn evaluate(
    spec: &SystemSpec,
    policy: &TestPolicy,
    method: Method,
    points_per_interval: usize,
) -> Result<PfdReport> {
    let unavailability = |i: usize, t: f64| match method {
        Method::Exact => system_unavailability_in(spec, policy, i, t),
        Method::Approximate => approx::system_unavailability_approx_in(spec, policy, i, t),
    };
    let (pfd_per_interval, pfd_avg) = match method {
        Method::Exact => (pfd_per_interval(spec, policy), pfd_avg(spec, policy)),
        Method::Approximate => (
            (0..policy.n_tests())
                .map(|i| pfd_interval_approx(spec, policy, i))
                .collect::<Result<Vec<_>>>()?,
            pfd_avg_approx(spec, policy),
        ),
    };
    let (t_u_max, u_max) =
        curve::max_unavailability_with(policy, MAX_SEARCH_RESOLUTION, unavailability)?;
    let curve = curve::sample_curve_with(policy, points_per_interval, unavailability)?;
    Ok(PfdReport {
        pfd_per_interval,
        pfd_avg,
        u_max,
        t_u_max,
        curve,
    })
}
