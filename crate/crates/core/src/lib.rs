//! Availability and probability of failure on demand (PFD) for MooN safety
//! instrumented systems whose components are proof-tested by a mix of partial
//! and full tests.
//!
//! The crate is organised around four pieces:
//!
//! - [`pfd`]: exact and first-order closed forms for component/system
//!   availability, per-interval PFD and PFDavg over a full-test cycle.
//! - [`estimation`]: failure-rate and partial-test efficiency estimators from
//!   test observations, with exact binomial confidence intervals.
//! - [`schedule`]: placement of the partial tests inside the full-test
//!   interval to minimise PFDavg.
//! - [`montecarlo`]: a seeded discrete-event simulator used as an independent
//!   check of the closed forms and as a generator of synthetic observations.
//!
//! All times are in hours and all rates in 1/hour (see [`units`]).

pub mod error;
pub mod estimation;
pub mod model;
pub mod montecarlo;
pub mod pfd;
pub mod schedule;
pub mod units;

pub use error::{Error, Result};
pub use estimation::{EstimationResult, EstimationWarning, Interval, ObservationSet};
pub use model::{Schedule, SystemSpec, TestPolicy, MAX_COMPONENTS};
pub use montecarlo::{SimConfig, SimResult};
pub use pfd::{CurvePoint, PfdReport};
pub use schedule::{OptimizationResult, PolicyComparison, SolverSettings, SolverTrace};
