//! Force fields, polar equations of motion and the reduced equations
//! obtained from them.

pub mod angle;
pub mod force;
pub mod reduced;

pub use angle::AngleFunction;
pub use force::{curl, curl_fd, eval_force, polar_rhs, ForceField, PolarRhs};
pub use reduced::{
    drag_ef_rhs, ef_rhs, geodesic_rhs, mu_minus3_rhs, orbit_polar_rhs, psi_reduced_rhs, third_order_rhs,
    DragEmdenFowler, EmdenFowler, Geodesic, OrbitEquation, PsiEquation, ThirdOrder, Variant,
};

/// `x^p` with `powi` for integral exponents, so negative bases stay real
/// whenever the power is.
pub fn real_pow(x: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
        x.powi(p as i32)
    } else {
        x.powf(p)
    }
}
