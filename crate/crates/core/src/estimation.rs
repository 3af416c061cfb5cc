//! Failure-rate and partial-test efficiency estimates from test records.
//!
//! Observation model (first order in lambda*T): a component is seen failed at
//! partial test `i < n` with probability `E lambda T_i`, and at the full test
//! with probability `E lambda T_n + (1 - E) lambda tau`. Summing counts over
//! the cycle gives `lambda`; the share caught by partial tests gives `E`.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use statrs::function::gamma::gamma_lr;

use crate::error::{Error, Result};
use crate::model::Schedule;

/// Default two-sided confidence level.
pub const DEFAULT_LEVEL: f64 = 0.90;

/// Above this `lambda_hat * tau` the first-order estimators are visibly biased.
pub const FIRST_ORDER_LIMIT: f64 = 0.1;

const BISECTION_TOLERANCE: f64 = 1e-12;

/// Failures counted at each test of one cycle, aggregated over `components`
/// observed components per test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSet {
    failures: Vec<u64>,
    components: u64,
    schedule: Schedule,
}

impl ObservationSet {
    pub fn new(failures: Vec<u64>, components: u64, schedule: Schedule) -> Result<Self> {
        if components == 0 {
            return Err(Error::invalid(
                "number of observed components must be positive",
            ));
        }
        if failures.len() != schedule.len() {
            return Err(Error::invalid(format!(
                "{} failure counts for {} tests",
                failures.len(),
                schedule.len()
            )));
        }
        if let Some((i, k)) = failures.iter().enumerate().find(|(_, &k)| k > components) {
            return Err(Error::invalid(format!(
                "failure count k[{i}] = {k} exceeds the {components} observed components"
            )));
        }
        Ok(ObservationSet {
            failures,
            components,
            schedule,
        })
    }

    pub fn failures(&self) -> &[u64] {
        &self.failures
    }

    /// K, the number of components observed at every test.
    pub fn components(&self) -> u64 {
        self.components
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn total_failures(&self) -> u64 {
        self.failures.iter().sum()
    }

    pub fn partial_failures(&self) -> u64 {
        self.failures[..self.failures.len() - 1].iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    /// Only the upper bound is informative (`lower` is the range minimum).
    #[serde(default)]
    pub one_sided: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    fn scaled(self, factor: f64) -> Self {
        Interval {
            lower: self.lower * factor,
            upper: self.upper * factor,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimationWarning {
    /// No failure at all; the rate interval is one-sided.
    NoFailuresObserved,
    /// Sampling noise pushed the efficiency ratio above 1.
    EfficiencyClamped {
        raw: f64,
    },
    EfficiencyUndefined {
        reason: String,
    },
    /// Total failures exceed the number of observed components; the rate
    /// interval falls back to an exact Poisson interval.
    PoissonInterval {
        total_failures: u64,
        components: u64,
    },
    /// `lambda_hat * tau` is large for the first-order observation model.
    FirstOrderRegime {
        lambda_tau: f64,
    },
}

/// A point estimate with its confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// Estimator output before clamping to the parameter range.
    pub raw: f64,
    pub interval: Interval,
    pub warnings: Vec<EstimationWarning>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub lambda_hat: f64,
    pub lambda_ci: Interval,
    pub e_hat_raw: Option<f64>,
    pub e_hat: Option<f64>,
    pub e_ci: Option<Interval>,
    pub warnings: Vec<EstimationWarning>,
}

/// Model probability of seeing a given component failed at test `i`
/// (0-based): `E lambda T_i`, plus `(1 - E) lambda tau` at the full test.
pub fn predicted_obs(lambda: f64, efficiency: f64, schedule: &Schedule, i: usize) -> Result<f64> {
    schedule.check_index(i)?;
    crate::model::check_efficiency(efficiency)?;
    let mut p = efficiency * lambda * schedule.interval(i);
    if i + 1 == schedule.len() {
        p += (1.0 - efficiency) * lambda * schedule.tau();
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidModel(format!(
            "first-order observation probability {p} at test {i} is outside [0, 1]"
        )));
    }
    Ok(p)
}

/// `k_i / K`.
pub fn empirical_obs(obs: &ObservationSet, i: usize) -> Result<f64> {
    obs.schedule.check_index(i)?;
    Ok(obs.failures[i] as f64 / obs.components as f64)
}

/// `sum k_i / (K tau)` with an exact interval on `lambda tau`, scaled by `1/tau`.
pub fn estimate_lambda(obs: &ObservationSet, level: f64) -> Result<Estimate> {
    check_level(level)?;
    let tau = obs.schedule.tau();
    let total = obs.total_failures();
    let k = obs.components;
    let value = total as f64 / (k as f64 * tau);
    let mut warnings = Vec::new();

    let interval = if total == 0 {
        warnings.push(EstimationWarning::NoFailuresObserved);
        Interval {
            lower: 0.0,
            upper: binomial_upper_bound(0, k, level)?,
            level,
            one_sided: true,
        }
    } else if total > k {
        warnings.push(EstimationWarning::PoissonInterval {
            total_failures: total,
            components: k,
        });
        poisson_ci(total, level)?.scaled(1.0 / k as f64)
    } else {
        binomial_ci(total, k, level)?
    };
    if value * tau > FIRST_ORDER_LIMIT {
        warnings.push(EstimationWarning::FirstOrderRegime {
            lambda_tau: value * tau,
        });
    }
    Ok(Estimate {
        value,
        raw: value,
        interval: interval.scaled(1.0 / tau),
        warnings,
    })
}

/// `(tau / t_{n-1}) * sum_{i<n} k_i / sum_i k_i`, clamped to `[0, 1]`.
///
/// Given `m` failures in total, the number caught by partial tests is
/// binomial with success probability `E t_{n-1} / tau`; the interval is the
/// exact interval on that probability, rescaled and clamped.
pub fn estimate_efficiency(obs: &ObservationSet, level: f64) -> Result<Estimate> {
    check_level(level)?;
    let total = obs.total_failures();
    if total == 0 {
        return Err(Error::UndefinedEstimate(
            "partial-test efficiency needs at least one observed failure".into(),
        ));
    }
    let last_partial = obs.schedule.last_partial();
    if last_partial == 0.0 {
        return Err(Error::UndefinedEstimate(
            "partial-test efficiency needs at least one partial test".into(),
        ));
    }
    let ratio = obs.schedule.tau() / last_partial;
    let partial = obs.partial_failures();
    let raw = ratio * partial as f64 / total as f64;
    let mut warnings = Vec::new();
    let value = if raw > 1.0 {
        warnings.push(EstimationWarning::EfficiencyClamped { raw });
        1.0
    } else {
        raw
    };
    let ci = binomial_ci(partial, total, level)?;
    let interval = Interval {
        lower: (ci.lower * ratio).min(1.0),
        upper: (ci.upper * ratio).min(1.0),
        ..ci
    };
    Ok(Estimate {
        value,
        raw,
        interval,
        warnings,
    })
}

/// Both estimators with their intervals. An undefined efficiency is reported
/// as a warning rather than an error.
pub fn estimate_all(obs: &ObservationSet, level: f64) -> Result<EstimationResult> {
    let lambda = estimate_lambda(obs, level)?;
    let mut warnings = lambda.warnings;
    let (e_hat_raw, e_hat, e_ci) = match estimate_efficiency(obs, level) {
        Ok(e) => {
            warnings.extend(e.warnings);
            (Some(e.raw), Some(e.value), Some(e.interval))
        }
        Err(Error::UndefinedEstimate(reason)) => {
            warnings.push(EstimationWarning::EfficiencyUndefined { reason });
            (None, None, None)
        }
        Err(other) => return Err(other),
    };
    Ok(EstimationResult {
        lambda_hat: lambda.value,
        lambda_ci: lambda.interval,
        e_hat_raw,
        e_hat,
        e_ci,
        warnings,
    })
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    Ok(())
}

/// Smallest `x` in `[lo, hi]` with `f(x) >= target`, for nondecreasing `f`.
fn bisect(mut lo: f64, mut hi: f64, target: f64, f: impl Fn(f64) -> f64) -> f64 {
    while hi - lo > BISECTION_TOLERANCE * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
///
/// The bounds are quantiles of Beta(k, K-k+1) and Beta(k+1, K-k), found by
/// bisection on the regularized incomplete beta function.
pub fn binomial_ci(k: u64, big_k: u64, level: f64) -> Result<Interval> {
    check_level(level)?;
    if big_k == 0 || k > big_k {
        return Err(Error::invalid(format!(
            "binomial interval needs 0 <= k <= K and K > 0, got k={k}, K={big_k}"
        )));
    }
    let alpha = 1.0 - level;
    let (kf, nf) = (k as f64, big_k as f64);
    let lower = if k == 0 {
        0.0
    } else {
        bisect(0.0, 1.0, alpha / 2.0, |p| beta_reg(kf, nf - kf + 1.0, p))
    };
    let upper = if k == big_k {
        1.0
    } else {
        bisect(0.0, 1.0, 1.0 - alpha / 2.0, |p| {
            beta_reg(kf + 1.0, nf - kf, p)
        })
    };
    Ok(Interval {
        lower,
        upper,
        level,
        one_sided: false,
    })
}

/// One-sided upper confidence bound for a binomial proportion.
pub fn binomial_upper_bound(k: u64, big_k: u64, level: f64) -> Result<f64> {
    check_level(level)?;
    if big_k == 0 || k > big_k {
        return Err(Error::invalid(format!(
            "binomial bound needs 0 <= k <= K and K > 0, got k={k}, K={big_k}"
        )));
    }
    if k == big_k {
        return Ok(1.0);
    }
    if k == 0 {
        return Ok(1.0 - (1.0 - level).powf(1.0 / big_k as f64));
    }
    let (kf, nf) = (k as f64, big_k as f64);
    Ok(bisect(0.0, 1.0, level, |p| beta_reg(kf + 1.0, nf - kf, p)))
}

/// Exact (Garwood) interval on a Poisson mean from an observed count.
fn poisson_ci(count: u64, level: f64) -> Result<Interval> {
    check_level(level)?;
    let alpha = 1.0 - level;
    let c = count as f64;
    let hi_bracket = c + 1.0 + 20.0 * (c + 1.0).sqrt() + 50.0;
    let lower = if count == 0 {
        0.0
    } else {
        bisect(0.0, hi_bracket, alpha / 2.0, |x| gamma_lr(c, x))
    };
    let upper = bisect(0.0, hi_bracket, 1.0 - alpha / 2.0, |x| gamma_lr(c + 1.0, x));
    Ok(Interval {
        lower,
        upper,
        level,
        one_sided: false,
    })
}
