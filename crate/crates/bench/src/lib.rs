//! Shared inputs for the benchmarks.

use curlforce_core::{ForceField, IntegratorSettings};

/// Initial polar state used by the trajectory benchmarks.
pub const POLAR_Y0: [f64; 4] = [1.0, 0.0, 0.1, 0.5];

pub fn ermakov() -> ForceField {
    ForceField::ermakov_example()
}

pub fn adaptive(t1: f64) -> IntegratorSettings {
    IntegratorSettings::adaptive(0.0, t1, 1e-10, 1e-12)
}
