//! Asymptotic performance analysis of k-th best secondary-user selection in
//! interference-limited underlay cognitive-radio networks.
//!
//! The crate evaluates closed-form large-N approximations of the average
//! throughput, effective throughput, average BER and outage probability
//! ([`asymptotics`]) and checks them against an exact-model Monte Carlo
//! simulator ([`montecarlo`]). The k-th largest normalized SIR converges to
//! an inverse-gamma law, see [`model::LimitingDistribution`].

pub mod asymptotics;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod presets;
pub mod specfun;

pub use asymptotics::{evaluate, AsymptoticResult};
pub use error::{Error, Result};
pub use model::{CsiParams, LimitingDistribution, Metric, StPower, SystemParams};
pub use montecarlo::{estimate, EstimateResult, TrialOutcome};
