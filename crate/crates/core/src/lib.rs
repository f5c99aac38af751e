//! Analytical engine and Monte Carlo oracle for RIS-assisted cellular
//! networks modeled with stochastic geometry.
//!
//! The crate computes, for a network of base stations (PPP) carrying rings of
//! reconfigurable intelligent surfaces (Matern cluster daughter PPPs):
//!
//! - coverage probability and ergodic rate via bilateral Laplace transforms
//!   and a symmetrized principal-value inversion formula ([`coverage`]),
//! - first-order sensitivities of the rate with respect to the BS and RIS
//!   densities ([`sensitivity`]),
//! - a round-by-round BS-vs-RIS investment policy driven by those
//!   sensitivities and a relative cost model ([`planner`]),
//! - an independent Monte Carlo point-process simulator used to validate
//!   every analytical output ([`mc`]).
//!
//! Two deployment scenarios are supported: throughput enhancement (typical
//! user beyond a guard distance, rings centered on base stations) and
//! coverage-hole mitigation (user at a hole center with an attenuated direct
//! link, ring centered on the hole).
//!
//! All internal math is in linear SI units (W, m, densities per m^2); human
//! units (dBm, dB, per km^2) are converted once at config ingestion
//! ([`config`]).

pub mod config;
pub mod coverage;
pub mod error;
pub mod mc;
pub mod model;
pub mod planner;
pub mod quad;
pub mod sensitivity;
pub mod transforms;

pub use config::ScenarioConfig;
pub use coverage::{coverage_probability, ergodic_rate_at, ergodic_rate_typical, RateResult};
pub use error::{Error, Result};
pub use model::{ClusterRing, Scenario, SystemParams};
pub use planner::{CostModel, Decision, InvestmentState, Trajectory};
pub use quad::QuadratureConfig;
pub use sensitivity::{d_tau, rate_and_gains, DensityVar, GainPair};
pub use transforms::{ComplexValue, RocBounds};
