//! Domain types: the MooN system and the proof-test policy applied to it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported component count. Keeps the S(M, N, x) coefficients exact
/// in 128-bit integers.
pub const MAX_COMPONENTS: u32 = 30;

/// A MooN architecture of identical components with a constant dangerous
/// undetected failure rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystemSpec")]
pub struct SystemSpec {
    m: u32,
    n_components: u32,
    lambda: f64,
}

#[derive(Deserialize)]
struct RawSystemSpec {
    m: u32,
    n_components: u32,
    lambda: f64,
}

impl TryFrom<RawSystemSpec> for SystemSpec {
    type Error = Error;

    fn try_from(raw: RawSystemSpec) -> Result<Self> {
        SystemSpec::new(raw.m, raw.n_components, raw.lambda)
    }
}

impl SystemSpec {
    pub fn new(m: u32, n_components: u32, lambda: f64) -> Result<Self> {
        if m < 1 || m > n_components || n_components > MAX_COMPONENTS {
            return Err(Error::invalid(format!(
                "architecture {m}oo{n_components} requires 1 <= M <= N <= {MAX_COMPONENTS}"
            )));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::invalid(format!(
                "failure rate must be finite and non-negative, got {lambda}"
            )));
        }
        Ok(SystemSpec {
            m,
            n_components,
            lambda,
        })
    }

    /// Minimum number of operative components for the safety function.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n_components(&self) -> u32 {
        self.n_components
    }

    /// Per-component dangerous undetected failure rate, 1/hour.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of component failures that defeat the system, N - M + 1.
    pub fn failures_to_defeat(&self) -> u32 {
        self.n_components - self.m + 1
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        SystemSpec::new(self.m, self.n_components, lambda)
    }
}

/// Strictly increasing test instants t_1 < ... < t_n. The last instant is the
/// full test and defines the cycle length tau; earlier ones are partial tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Schedule {
    times: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Schedule {
    type Error = Error;

    fn try_from(times: Vec<f64>) -> Result<Self> {
        Schedule::new(times)
    }
}

impl From<Schedule> for Vec<f64> {
    fn from(s: Schedule) -> Self {
        s.times
    }
}

impl Schedule {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::invalid("a schedule needs at least the full test"));
        }
        let mut prev = 0.0;
        for (i, &t) in times.iter().enumerate() {
            if !t.is_finite() || t <= prev {
                return Err(Error::invalid(format!(
                    "test times must be finite and strictly increasing from 0; \
                     t[{i}] = {t} does not exceed {prev}"
                )));
            }
            prev = t;
        }
        Ok(Schedule { times })
    }

    /// `n` equally spaced tests over `[0, tau]`.
    pub fn periodic(n_tests: usize, tau: f64) -> Result<Self> {
        if n_tests == 0 {
            return Err(Error::invalid("at least one test is required"));
        }
        let step = tau / n_tests as f64;
        let mut times: Vec<f64> = (1..n_tests).map(|i| step * i as f64).collect();
        times.push(tau);
        Schedule::new(times)
    }

    /// Partial-test instants followed by the full test at `tau`.
    pub fn from_partials(partials: &[f64], tau: f64) -> Result<Self> {
        let mut times = partials.to_vec();
        times.push(tau);
        Schedule::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of tests n, the full test included.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tau(&self) -> f64 {
        *self.times.last().expect("schedule is never empty")
    }

    /// Start of interval `i` (0-based), t_0 = 0.
    pub fn start(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.times[i - 1]
        }
    }

    /// End of interval `i` (0-based).
    pub fn end(&self, i: usize) -> f64 {
        self.times[i]
    }

    /// Length T_i of interval `i` (0-based).
    pub fn interval(&self, i: usize) -> f64 {
        self.end(i) - self.start(i)
    }

    pub fn intervals(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.interval(i))
    }

    /// Instant of the last partial test, t_{n-1}; zero when there are none.
    pub fn last_partial(&self) -> f64 {
        self.start(self.len() - 1)
    }

    pub fn partial_times(&self) -> &[f64] {
        &self.times[..self.len() - 1]
    }

    /// Interval containing `t`, using the latest test strictly before `t`
    /// as its start. `t = tau` falls in the last interval.
    pub fn locate(&self, t: f64) -> Result<usize> {
        if !(0.0..=self.tau()).contains(&t) {
            return Err(Error::invalid(format!(
                "time {t} h is outside the test cycle [0, {}]",
                self.tau()
            )));
        }
        Ok(self.times.partition_point(|&ti| ti < t).min(self.len() - 1))
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::invalid(format!(
                "interval index {i} out of range for {} tests",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Partial-test efficiency E together with the test schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTestPolicy")]
pub struct TestPolicy {
    efficiency: f64,
    schedule: Schedule,
}

#[derive(Deserialize)]
struct RawTestPolicy {
    efficiency: f64,
    schedule: Schedule,
}

impl TryFrom<RawTestPolicy> for TestPolicy {
    type Error = Error;

    fn try_from(raw: RawTestPolicy) -> Result<Self> {
        TestPolicy::new(raw.efficiency, raw.schedule)
    }
}

impl TestPolicy {
    pub fn new(efficiency: f64, schedule: Schedule) -> Result<Self> {
        check_efficiency(efficiency)?;
        Ok(TestPolicy {
            efficiency,
            schedule,
        })
    }

    pub fn from_times(efficiency: f64, times: Vec<f64>) -> Result<Self> {
        TestPolicy::new(efficiency, Schedule::new(times)?)
    }

    pub fn periodic(efficiency: f64, n_tests: usize, tau: f64) -> Result<Self> {
        TestPolicy::new(efficiency, Schedule::periodic(n_tests, tau)?)
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn tau(&self) -> f64 {
        self.schedule.tau()
    }

    pub fn n_tests(&self) -> usize {
        self.schedule.len()
    }
}

pub(crate) fn check_efficiency(e: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::invalid(format!(
            "partial-test efficiency must lie in [0, 1], got {e}"
        )));
    }
    Ok(())
}
