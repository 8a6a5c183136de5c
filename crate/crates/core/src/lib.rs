//! Planar motion under noncentral curl forces, its reduction to
//! Emden–Fowler form, and the first integrals and special solutions of
//! the reduced equations.
//!
//! Modules:
//! - [`state`], [`series`], [`metrics`]: shared data types and drift statistics
//! - [`integrate`]: explicit Runge–Kutta integration with dense output and events
//! - [`systems`]: force fields and the reduced equations
//! - [`invariants`]: first integrals and the Noether machinery
//! - [`analysis`]: torque mapping, particular solutions, quadratures and residual reports

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod integrate;
pub mod invariants;
pub mod metrics;
pub mod series;
pub mod state;
pub mod systems;

pub use error::{Error, Result};
pub use integrate::{integrate, solve_orbit_ode, Event, IntegratorSettings, Method, OdeSystem, SecondOrderOde};
pub use metrics::{drift_metric, InvariantReport};
pub use series::{fd_second_derivative, EFPoint, EFSeries};
pub use state::{resample, PolarState, Termination, Trajectory};
pub use systems::{AngleFunction, ForceField, Variant};
