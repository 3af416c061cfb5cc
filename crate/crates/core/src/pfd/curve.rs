//! Sampled unavailability curves and their maximum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Schedule, SystemSpec, TestPolicy};

use super::exact::system_unavailability_in;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t_hours: f64,
    pub unavailability: f64,
}

/// Sample instants as `(interval, t)`. Each interval contributes
/// `points_per_interval` evenly spaced instants from its start (value just
/// after the test) to its end (value just before the next test), so test
/// instants appear twice.
pub fn sample_instants(
    schedule: &Schedule,
    points_per_interval: usize,
) -> Result<Vec<(usize, f64)>> {
    if points_per_interval < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 points per interval, got {points_per_interval}"
        )));
    }
    let last = (points_per_interval - 1) as f64;
    let mut out = Vec::with_capacity(schedule.len() * points_per_interval);
    for i in 0..schedule.len() {
        let (a, b) = (schedule.start(i), schedule.end(i));
        for j in 0..points_per_interval {
            let t = if j + 1 == points_per_interval {
                b
            } else {
                a + (b - a) * j as f64 / last
            };
            out.push((i, t));
        }
    }
    Ok(out)
}

/// Unavailability samples with one-sided values kept at every test instant.
pub fn sample_curve(
    spec: &SystemSpec,
    policy: &TestPolicy,
    points_per_interval: usize,
) -> Result<Vec<CurvePoint>> {
    sample_curve_with(policy, points_per_interval, |i, t| {
        system_unavailability_in(spec, policy, i, t)
    })
}

pub(crate) fn sample_curve_with(
    policy: &TestPolicy,
    points_per_interval: usize,
    unavailability: impl Fn(usize, f64) -> f64,
) -> Result<Vec<CurvePoint>> {
    Ok(sample_instants(policy.schedule(), points_per_interval)?
        .into_iter()
        .map(|(i, t)| CurvePoint {
            t_hours: t,
            unavailability: unavailability(i, t).clamp(0.0, 1.0),
        })
        .collect())
}

/// Largest unavailability over the cycle, as `(t_star, u_max)`.
///
/// Unavailability only grows between tests, so the maximum sits at the left
/// limit of some test instant; `t_star` is that instant. Intermediate samples
/// at the given resolution are scanned as well.
pub fn max_unavailability(
    spec: &SystemSpec,
    policy: &TestPolicy,
    resolution: usize,
) -> Result<(f64, f64)> {
    max_unavailability_with(policy, resolution, |i, t| {
        system_unavailability_in(spec, policy, i, t)
    })
}

pub(crate) fn max_unavailability_with(
    policy: &TestPolicy,
    resolution: usize,
    unavailability: impl Fn(usize, f64) -> f64,
) -> Result<(f64, f64)> {
    if resolution < 16 {
        return Err(Error::invalid(format!(
            "resolution must be at least 16 samples per interval, got {resolution}"
        )));
    }
    let schedule = policy.schedule();
    let mut best = (schedule.tau(), 0.0);
    for i in 0..schedule.len() {
        let (a, b) = (schedule.start(i), schedule.end(i));
        let mut interval_max: f64 = 0.0;
        for j in 1..=resolution {
            let t = a + (b - a) * j as f64 / resolution as f64;
            interval_max = interval_max.max(unavailability(i, t.min(b)));
        }
        let u = interval_max.clamp(0.0, 1.0);
        if u >= best.1 {
            best = (b, u);
        }
    }
    Ok(best)
}
