//! The Emden–Fowler pipeline: mapping, particular solutions, quadratures
//! and residual reports.

pub mod mapping;
pub mod particular;
pub mod quadrature;
pub mod special;

pub use mapping::{
    abel_reduction_residual, drag_map_residual, ef_residual, scaled_solution_residual, torque_map, AbelReport,
    DragMapReport, EfResidualReport, ResidualStats,
};
pub use particular::{ef_exponent, j_of_r, lambda_coeff, seed_polar_from_particular, ParticularSolution};
pub use quadrature::{orbit_theta_of_r, quad_adaptive, time_of_r, BranchQuadrature, QuadPoint, QuadratureResult};
pub use special::{exponential_residual, power_condition, power_solution_y0, PowerSolution};
