//! Discrete-event Monte Carlo model of the test cycle.
//!
//! Each component carries two independent exponential clocks in series: a
//! detectable one of rate `E lambda`, restarted at every test, and a latent
//! one of rate `(1 - E) lambda`, restarted only by the full test. Inside
//! interval `i` a component is down from
//! `min(t_{i-1} + X_i, max(Y, t_{i-1}))`, where `X_i` is the detectable
//! clock drawn for that interval and `Y` the latent failure instant. The
//! system is down once `N - M + 1` components are down, so its downtime in
//! the interval is exact given the draws; no time grid is involved.

mod rng;

pub use rng::{Mode, StreamKey};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::ObservationSet;
use crate::model::{check_efficiency, Schedule, SystemSpec, TestPolicy};
use crate::pfd::sample_instants;

/// Replications handled by one parallel work item. Fixed so that the merge
/// order never depends on the thread pool.
const CHUNK: u64 = 1024;

/// Salt separating observation streams from system-simulation streams.
const OBSERVATION_SALT: u64 = 0x6f62_7365_7276_6564;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub spec: SystemSpec,
    pub policy: TestPolicy,
    pub replications: u64,
    pub seed: u64,
    /// Curve samples per interval; 0 disables the curve.
    pub curve_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveEstimate {
    pub t_hours: f64,
    pub unavailability: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub pfd_avg_hat: f64,
    pub std_err: f64,
    pub replications: u64,
    pub seed: u64,
    pub u_curve_hat: Vec<CurveEstimate>,
    pub obs_counts: Option<ObservationSet>,
}

/// Running mean and squared deviations (Welford), plus curve hit counts.
#[derive(Debug, Clone)]
struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
    down_hits: Vec<u64>,
}

impl Accumulator {
    fn new(samples: usize) -> Self {
        Accumulator {
            n: 0,
            mean: 0.0,
            m2: 0.0,
            down_hits: vec![0; samples],
        }
    }

    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
        for (a, b) in self.down_hits.iter_mut().zip(other.down_hits) {
            *a += b;
        }
        self
    }
}

struct Replicator<'a> {
    spec: &'a SystemSpec,
    schedule: &'a Schedule,
    detectable_rate: f64,
    latent_rate: f64,
    seed: u64,
    instants: Vec<(usize, f64)>,
}

impl<'a> Replicator<'a> {
    fn new(config: &'a SimConfig) -> Result<Self> {
        let instants = if config.curve_samples == 0 {
            Vec::new()
        } else {
            sample_instants(config.policy.schedule(), config.curve_samples)?
        };
        let lambda = config.spec.lambda();
        let e = config.policy.efficiency();
        Ok(Replicator {
            spec: &config.spec,
            schedule: config.policy.schedule(),
            detectable_rate: e * lambda,
            latent_rate: (1.0 - e) * lambda,
            seed: config.seed,
            instants,
        })
    }

    /// Instant, per interval, at which the system goes down (infinite when
    /// it survives the interval).
    fn system_down_starts(&self, replication: u64, scratch: &mut Vec<f64>, out: &mut Vec<f64>) {
        let n = self.spec.n_components() as usize;
        let rank = self.spec.failures_to_defeat() as usize - 1;
        let latent: Vec<f64> = (0..n as u64)
            .map(|c| {
                StreamKey::new(self.seed, replication, c, Mode::Latent)
                    .exponential(0, self.latent_rate)
            })
            .collect();
        let detectable: Vec<StreamKey> = (0..n as u64)
            .map(|c| StreamKey::new(self.seed, replication, c, Mode::Detectable))
            .collect();
        out.clear();
        for i in 0..self.schedule.len() {
            let start = self.schedule.start(i);
            scratch.clear();
            scratch.extend((0..n).map(|c| {
                let detect = start + detectable[c].exponential(i as u64, self.detectable_rate);
                detect.min(latent[c].max(start))
            }));
            let (_, kth, _) = scratch.select_nth_unstable_by(rank, f64::total_cmp);
            out.push(*kth);
        }
    }

    fn run_chunk(&self, first: u64, last: u64) -> Accumulator {
        let tau = self.schedule.tau();
        let mut acc = Accumulator::new(self.instants.len());
        let mut scratch = Vec::with_capacity(self.spec.n_components() as usize);
        let mut down = Vec::with_capacity(self.schedule.len());
        for r in first..last {
            self.system_down_starts(r, &mut scratch, &mut down);
            let downtime: f64 = down
                .iter()
                .enumerate()
                .map(|(i, &d)| (self.schedule.end(i) - d).max(0.0))
                .sum();
            acc.push(downtime / tau);
            for (hit, &(i, t)) in acc.down_hits.iter_mut().zip(&self.instants) {
                if down[i] <= t {
                    *hit += 1;
                }
            }
        }
        acc
    }
}

/// Estimate PFDavg (and optionally the unavailability curve) by simulation.
pub fn simulate_system(config: &SimConfig) -> Result<SimResult> {
    if config.replications == 0 {
        return Err(Error::invalid("at least one replication is required"));
    }
    let rep = Replicator::new(config)?;
    let chunks = config.replications.div_ceil(CHUNK);
    let partials: Vec<Accumulator> = (0..chunks)
        .into_par_iter()
        .map(|c| rep.run_chunk(c * CHUNK, ((c + 1) * CHUNK).min(config.replications)))
        .collect();
    let total = partials
        .into_iter()
        .fold(Accumulator::new(rep.instants.len()), Accumulator::merge);

    let n = total.n as f64;
    let std_err = if total.n > 1 {
        (total.m2 / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    let u_curve_hat = rep
        .instants
        .iter()
        .zip(&total.down_hits)
        .map(|(&(_, t), &hits)| {
            let p = hits as f64 / n;
            CurveEstimate {
                t_hours: t,
                unavailability: p,
                std_err: (p * (1.0 - p) / n).sqrt(),
            }
        })
        .collect();
    Ok(SimResult {
        pfd_avg_hat: total.mean.clamp(0.0, 1.0),
        std_err,
        replications: config.replications,
        seed: config.seed,
        u_curve_hat,
        obs_counts: None,
    })
}

/// Pointwise mean unavailability at `curve_samples` instants per interval.
pub fn empirical_curve(config: &SimConfig) -> Result<Vec<CurveEstimate>> {
    if config.curve_samples < 2 {
        return Err(Error::invalid(format!(
            "empirical curve needs at least 2 samples per interval, got {}",
            config.curve_samples
        )));
    }
    Ok(simulate_system(config)?.u_curve_hat)
}

/// Synthetic test records for `big_k` components followed over one cycle.
///
/// A partial test sees a component failed when its detectable clock fired in
/// the preceding interval; the full test sees it failed when either clock
/// fired (detectable in the last interval, latent at any time).
pub fn simulate_observations(
    lambda: f64,
    efficiency: f64,
    schedule: &Schedule,
    big_k: u64,
    seed: u64,
) -> Result<ObservationSet> {
    check_efficiency(efficiency)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("invalid failure rate {lambda}")));
    }
    let n = schedule.len();
    let detectable_rate = efficiency * lambda;
    let latent_rate = (1.0 - efficiency) * lambda;
    let mut counts = vec![0u64; n];
    for c in 0..big_k {
        let latent =
            StreamKey::new(seed ^ OBSERVATION_SALT, c, 0, Mode::Latent).exponential(0, latent_rate);
        let detectable = StreamKey::new(seed ^ OBSERVATION_SALT, c, 0, Mode::Detectable);
        for (i, count) in counts.iter_mut().enumerate() {
            let fired = detectable.exponential(i as u64, detectable_rate) < schedule.interval(i);
            let seen = if i + 1 == n {
                fired || latent <= schedule.tau()
            } else {
                fired
            };
            if seen {
                *count += 1;
            }
        }
    }
    ObservationSet::new(counts, big_k, schedule.clone())
}
