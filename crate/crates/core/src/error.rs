use thiserror::Error;

use crate::state::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("time {value} outside trajectory span [{start}, {end}]")]
    Range { value: f64, start: f64, end: f64 },

    #[error("particular-solution coefficient is not real for n = {n}, m = {m} (base {base} < 0)")]
    NonRealLambda { n: f64, m: f64, base: f64 },

    #[error("no positive root of the power-solution condition for lambda = {lambda} in [{lo}, {hi}]")]
    NoRoot { lambda: f64, lo: f64, hi: f64 },

    #[error("lambda = -1 admits no power solution; the special solution is Y0*exp(-z)")]
    ExponentialBranch,

    #[error("numerical failure at t = {t}: {reason}")]
    NumericalFailure {
        t: f64,
        reason: String,
        partial: Box<Trajectory>,
    },

    #[error("step limit of {max_steps} reached at t = {t}")]
    MaxSteps {
        t: f64,
        max_steps: usize,
        partial: Box<Trajectory>,
    },

    #[error("quadrature failed on [{a}, {b}]: {reason} (partial value {partial_value})")]
    Quadrature {
        a: f64,
        b: f64,
        reason: String,
        partial_value: f64,
    },
}

impl Error {
    /// The partial trajectory carried by integration failures, if any.
    pub fn partial_trajectory(&self) -> Option<&Trajectory> {
        match self {
            Error::NumericalFailure { partial, .. } | Error::MaxSteps { partial, .. } => Some(partial),
            _ => None,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalFailure { .. } | Error::MaxSteps { .. } | Error::Quadrature { .. } | Error::NoRoot { .. }
        )
    }
}
