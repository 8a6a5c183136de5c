//! Reduced scalar equations: the ψ-equation of Ermakov systems, the orbit
//! equation, Emden–Fowler families and the drag reductions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::angle::AngleFunction;
use super::real_pow;
use crate::error::{Error, Result};
use crate::integrate::{Event, OdeSystem, SecondOrderOde};

/// Stop threshold for singular denominators.
pub const DENOMINATOR_TOL: f64 = 1e-6;
/// Stop threshold for state floors (`T`, `|Y'|`).
pub const STATE_FLOOR: f64 = 1e-10;

/// Which form of an equation to integrate where the re-derived form and the
/// printed one differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Derived,
    AsPrinted,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Derived => "derived",
            Variant::AsPrinted => "as_printed",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derived" => Ok(Variant::Derived),
            "as_printed" | "as-printed" => Ok(Variant::AsPrinted),
            other => Err(Error::Argument(format!(
                "unknown variant '{other}' (expected derived or as_printed)"
            ))),
        }
    }
}

/// `ψ(θ) = 1/r` for an Ermakov system with `w = 0` on the level set `I` of
/// the angular invariant:
///
/// `ψ'' + c·(h²)'/h² · ψ' + (1 + U/h²)ψ = 0`, `h² = 2(I - V(θ))`,
///
/// with `c = 1/2` for the derived form and `c = 1` for the printed one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiEquation {
    pub i: f64,
    pub u: AngleFunction,
    pub v: AngleFunction,
    pub variant: Variant,
    /// Integration stops once `|I - V(θ)|` drops below this.
    pub den_tol: f64,
}

impl PsiEquation {
    pub fn new(i: f64, u: AngleFunction, v: AngleFunction, variant: Variant) -> Self {
        Self {
            i,
            u,
            v,
            variant,
            den_tol: DENOMINATOR_TOL,
        }
    }

    /// `V = cos θ`, `U = 0`: the transverse force `sin θ / r³`.
    pub fn cosine(i: f64, variant: Variant) -> Self {
        Self::new(i, AngleFunction::Zero, AngleFunction::cos(), variant)
    }

    /// `V = -θ`, `U = 0`: the isotropic force `F_θ = r⁻³`.
    pub fn mu_minus3(i: f64, variant: Variant) -> Self {
        Self::new(i, AngleFunction::Zero, AngleFunction::LinearTheta { c: -1.0 }, variant)
    }

    /// `I - V(θ)`, i.e. `h²/2`.
    pub fn half_h2(&self, theta: f64) -> f64 {
        self.i - self.v.value(theta)
    }

    /// Coefficient of `ψ'`.
    pub fn damping(&self, theta: f64) -> f64 {
        // (h²)'/h² = -V'/(I - V)
        let ratio = -self.v.derivative(theta, 1) / self.half_h2(theta);
        match self.variant {
            Variant::Derived => 0.5 * ratio,
            Variant::AsPrinted => ratio,
        }
    }

    /// Coefficient of `ψ`.
    pub fn stiffness(&self, theta: f64) -> f64 {
        if self.u.is_zero() {
            1.0
        } else {
            1.0 + self.u.value(theta) / (2.0 * self.half_h2(theta))
        }
    }
}

impl SecondOrderOde for PsiEquation {
    fn accel(&self, theta: f64, psi: f64, dpsi: f64) -> f64 {
        -self.damping(theta) * dpsi - self.stiffness(theta) * psi
    }

    fn guards(&self) -> Vec<Event> {
        let (i, v, tol) = (self.i, self.v.clone(), self.den_tol);
        vec![Event::new("singular-denominator", move |th, _| {
            (i - v.value(th)).abs() - tol
        })]
    }

    fn describe(&self) -> String {
        format!("psi[{}](I={})", self.variant, self.i)
    }
}

/// Orbit equation for `r(θ)` with `V = cos θ`:
/// `r'' = [2r'² - r r' sinθ/(2(I - cosθ)) + r²]/r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitEquation {
    pub i: f64,
    pub den_tol: f64,
    pub r_floor: f64,
}

impl OrbitEquation {
    pub fn new(i: f64) -> Self {
        Self {
            i,
            den_tol: DENOMINATOR_TOL,
            r_floor: super::force::DEFAULT_R_FLOOR,
        }
    }
}

impl SecondOrderOde for OrbitEquation {
    fn accel(&self, theta: f64, r: f64, rp: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        (2.0 * rp * rp - r * rp * s / (2.0 * (self.i - c)) + r * r) / r
    }

    fn guards(&self) -> Vec<Event> {
        let (i, tol, floor) = (self.i, self.den_tol, self.r_floor);
        vec![
            Event::new("singular-denominator", move |th, _| (i - th.cos()).abs() - tol),
            Event::new("r-floor", move |_, y| y[0] - floor),
        ]
    }

    fn describe(&self) -> String {
        format!("orbit(I={})", self.i)
    }
}

/// Emden–Fowler equation `T'' = Jⁿ T^m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmdenFowler {
    pub n: f64,
    pub m: f64,
    /// Stop floor on `T`, active only for negative `m`.
    pub t_floor: f64,
}

impl EmdenFowler {
    pub fn new(n: f64, m: f64) -> Self {
        Self {
            n,
            m,
            t_floor: STATE_FLOOR,
        }
    }

    /// Exponent `m = -(μ+4)/(μ+2)` reached from the isotropic force `r^μ`.
    pub fn from_mu(mu: f64) -> Result<Self> {
        if mu == -2.0 {
            return Err(Error::Argument("mu = -2 has no Emden-Fowler form".into()));
        }
        Ok(Self::new(2.0, -(mu + 4.0) / (mu + 2.0)))
    }
}

impl SecondOrderOde for EmdenFowler {
    fn accel(&self, j: f64, t: f64, _tp: f64) -> f64 {
        real_pow(j, self.n) * real_pow(t, self.m)
    }

    fn guards(&self) -> Vec<Event> {
        if self.m < 0.0 {
            let floor = self.t_floor;
            vec![Event::new("t-floor", move |_, y| y[0] - floor)]
        } else {
            Vec::new()
        }
    }

    fn describe(&self) -> String {
        format!("emden-fowler(n={},m={})", self.n, self.m)
    }
}

/// Drag Emden–Fowler family `T'' = T^λ T' + J² T^σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DragEmdenFowler {
    pub lambda: f64,
    pub sigma: f64,
    pub t_floor: f64,
}

impl DragEmdenFowler {
    pub fn new(lambda: f64, sigma: f64) -> Self {
        Self {
            lambda,
            sigma,
            t_floor: STATE_FLOOR,
        }
    }

    /// `λ = -(μ+4)/(μ+2)`, `σ = ν/(μ+2)`.
    pub fn from_mu_nu(mu: f64, nu: f64) -> Result<Self> {
        if mu == -2.0 {
            return Err(Error::Argument("mu = -2 has no Emden-Fowler form".into()));
        }
        Ok(Self::new(-(mu + 4.0) / (mu + 2.0), nu / (mu + 2.0)))
    }

    fn needs_positive_t(&self) -> bool {
        self.lambda.fract() != 0.0 || self.sigma.fract() != 0.0 || self.lambda < 0.0 || self.sigma < 0.0
    }
}

impl SecondOrderOde for DragEmdenFowler {
    fn accel(&self, j: f64, t: f64, tp: f64) -> f64 {
        real_pow(t, self.lambda) * tp + j * j * real_pow(t, self.sigma)
    }

    fn guards(&self) -> Vec<Event> {
        if self.needs_positive_t() {
            let floor = self.t_floor;
            vec![Event::new("t-floor", move |_, y| y[0] - floor)]
        } else {
            Vec::new()
        }
    }

    fn describe(&self) -> String {
        format!("drag-emden-fowler(lambda={},sigma={})", self.lambda, self.sigma)
    }
}

/// Autonomous geodesic system on the state `[T, J, dT/ds, dJ/ds]`:
///
/// `T̈ = J² T^σ J̇²`, `J̈ = ∓T^λ J̇²`.
///
/// Eliminating `s` gives `T'' = (T̈J̇ - ṪJ̈)/J̇³ = J²T^σ ± T^λ T'`. The derived
/// variant takes the minus sign on `J̈`, which reproduces
/// [`DragEmdenFowler`]; the printed plus sign flips the sign of the drag term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    pub lambda: f64,
    pub sigma: f64,
    pub variant: Variant,
    pub t_floor: f64,
}

impl Geodesic {
    pub fn new(lambda: f64, sigma: f64, variant: Variant) -> Self {
        Self {
            lambda,
            sigma,
            variant,
            t_floor: STATE_FLOOR,
        }
    }
}

impl OdeSystem for Geodesic {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, _s: f64, y: &[f64], dy: &mut [f64]) {
        let (t, j, td, jd) = (y[0], y[1], y[2], y[3]);
        let jd2 = jd * jd;
        let sign = match self.variant {
            Variant::Derived => -1.0,
            Variant::AsPrinted => 1.0,
        };
        dy[0] = td;
        dy[1] = jd;
        dy[2] = j * j * real_pow(t, self.sigma) * jd2;
        dy[3] = sign * real_pow(t, self.lambda) * jd2;
    }

    fn guards(&self) -> Vec<Event> {
        if DragEmdenFowler::new(self.lambda, self.sigma).needs_positive_t() {
            let floor = self.t_floor;
            vec![Event::new("t-floor", move |_, y| y[0] - floor)]
        } else {
            Vec::new()
        }
    }

    fn describe(&self) -> String {
        format!(
            "geodesic[{}](lambda={},sigma={})",
            self.variant, self.lambda, self.sigma
        )
    }
}

/// Autonomous third-order equation on the state `[Y, Y', Y'']`:
///
/// `Y''' = [(Y'' + Y'^{2+λ}) Y'' + Y² Y'^{σ+3}] / Y'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThirdOrder {
    pub lambda: f64,
    pub sigma: f64,
    /// Stop floor on `|Y'|`.
    pub slope_floor: f64,
}

impl ThirdOrder {
    pub fn new(lambda: f64, sigma: f64) -> Self {
        Self {
            lambda,
            sigma,
            slope_floor: STATE_FLOOR,
        }
    }

    /// Right-hand side for `Y'''`.
    pub fn third_derivative(&self, y: f64, y1: f64, y2: f64) -> f64 {
        ((y2 + real_pow(y1, 2.0 + self.lambda)) * y2 + y * y * real_pow(y1, self.sigma + 3.0)) / y1
    }

    /// `Y''' - rhs`, multiplied through by `Y'` to keep it finite near `Y' = 0`.
    pub fn residual(&self, y: f64, y1: f64, y2: f64, y3: f64) -> f64 {
        y3 * y1 - (y2 + real_pow(y1, 2.0 + self.lambda)) * y2 - y * y * real_pow(y1, self.sigma + 3.0)
    }
}

impl OdeSystem for ThirdOrder {
    fn dim(&self) -> usize {
        3
    }

    fn rhs(&self, _z: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = self.third_derivative(y[0], y[1], y[2]);
    }

    fn guards(&self) -> Vec<Event> {
        let floor = self.slope_floor;
        vec![Event::new("slope-floor", move |_, y| y[1].abs() - floor)]
    }

    fn describe(&self) -> String {
        format!("third-order(lambda={},sigma={})", self.lambda, self.sigma)
    }
}

pub fn psi_reduced_rhs(i: f64, u: AngleFunction, v: AngleFunction, variant: Variant) -> PsiEquation {
    PsiEquation::new(i, u, v, variant)
}

pub fn orbit_polar_rhs(i: f64) -> OrbitEquation {
    OrbitEquation::new(i)
}

pub fn ef_rhs(n: f64, m: f64) -> EmdenFowler {
    EmdenFowler::new(n, m)
}

pub fn mu_minus3_rhs(i: f64, variant: Variant) -> PsiEquation {
    PsiEquation::mu_minus3(i, variant)
}

pub fn drag_ef_rhs(lambda: f64, sigma: f64) -> DragEmdenFowler {
    DragEmdenFowler::new(lambda, sigma)
}

pub fn geodesic_rhs(lambda: f64, sigma: f64, variant: Variant) -> Geodesic {
    Geodesic::new(lambda, sigma, variant)
}

pub fn third_order_rhs(lambda: f64, sigma: f64) -> ThirdOrder {
    ThirdOrder::new(lambda, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, solve_orbit_ode, IntegratorSettings};
    use crate::state::Termination;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    #[test]
    fn psi_symmetric_point() {
        for variant in [Variant::Derived, Variant::AsPrinted] {
            let eq = PsiEquation::cosine(2.0, variant);
            assert_eq!(eq.damping(0.0), 0.0);
            assert_eq!(eq.accel(0.0, 0.3, 0.7), -0.3);
        }
    }

    #[test]
    fn psi_printed_coefficient_is_double() {
        let d = PsiEquation::cosine(2.0, Variant::Derived);
        let p = PsiEquation::cosine(2.0, Variant::AsPrinted);
        let th: f64 = 0.7;
        let printed = th.sin() / (2.0 - th.cos());
        assert!((p.damping(th) - printed).abs() < 1e-15);
        assert!((2.0 * d.damping(th) - printed).abs() < 1e-15);
    }

    #[test]
    fn psi_printed_stops_at_singular_angle() {
        let eq = PsiEquation::cosine(0.5, Variant::AsPrinted);
        let s = IntegratorSettings::adaptive(0.0, 20.0, 1e-10, 1e-12);
        let traj = solve_orbit_ode(&eq, 0.1, 0.1, &s).unwrap();
        assert_eq!(traj.meta.termination, Termination::Event);
        assert!((traj.t_span().1 - FRAC_PI_3).abs() < 1e-5);
    }

    #[test]
    fn psi_large_invariant_completes() {
        let eq = PsiEquation::cosine(2.0, Variant::AsPrinted);
        let s = IntegratorSettings::adaptive(0.0, 20.0, 1e-10, 1e-12);
        let traj = solve_orbit_ode(&eq, 0.1, 0.1, &s).unwrap();
        assert_eq!(traj.meta.termination, Termination::Completed);
        assert_eq!(traj.t_span().1, 20.0);
    }

    #[test]
    fn mu_minus3_coefficients() {
        let i = 0.4;
        let p = PsiEquation::mu_minus3(i, Variant::AsPrinted);
        let d = PsiEquation::mu_minus3(i, Variant::Derived);
        for th in [0.0, 1.0, 5.0] {
            let x = th + i;
            assert!((p.damping(th) - 1.0 / x).abs() < 1e-15);
            assert!((d.damping(th) - 0.5 / x).abs() < 1e-15);
        }
        assert!(p.damping(1e12).abs() < 1e-11);
        assert!(d.damping(1e12).abs() < 1e-11);
    }

    #[test]
    fn orbit_hand_values() {
        let eq = OrbitEquation::new(2.0);
        assert_eq!(eq.accel(0.0, 1.0, 0.0), 1.0);
        assert_eq!(eq.accel(FRAC_PI_2, 1.7, 0.0), 1.7);
    }

    #[test]
    fn ef_special_cases() {
        let lin = EmdenFowler::new(2.0, 1.0);
        assert_eq!(lin.accel(2.0, 3.0, 0.0), 12.0);
        let unit = EmdenFowler::new(0.0, 0.0);
        let s = IntegratorSettings::fixed(0.0, 2.0, 0.1);
        let traj = solve_orbit_ode(&unit, 1.0, -0.5, &s).unwrap();
        for (j, y) in traj.times().iter().zip(traj.states()) {
            let exact = 1.0 - 0.5 * j + 0.5 * j * j;
            assert!((y[0] - exact).abs() < 1e-13);
        }
        let ef = EmdenFowler::from_mu(-1.5).unwrap();
        assert_eq!((ef.n, ef.m), (2.0, -5.0));
        assert!(EmdenFowler::from_mu(-2.0).is_err());
    }

    #[test]
    fn drag_unit_base() {
        let eq = DragEmdenFowler::new(0.3, 2.5);
        assert_eq!(eq.accel(2.0, 1.0, 0.0), 4.0);
        // λ=0, σ=1 is linear: T'' - T' = J²T
        let lin = DragEmdenFowler::new(0.0, 1.0);
        assert!((lin.accel(1.5, 2.0, 0.25) - (0.25 + 2.25 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn geodesic_with_zero_j_velocity_is_straight() {
        let g = Geodesic::new(1.0, 5.0, Variant::Derived);
        let mut dy = [0.0; 4];
        g.rhs(0.0, &[1.2, 0.4, 0.7, 0.0], &mut dy);
        assert_eq!(dy, [0.7, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn geodesic_elimination_identity() {
        let (lambda, sigma) = (0.5, 2.0);
        let drag = DragEmdenFowler::new(lambda, sigma);
        let y = [1.3, 0.8, -0.4, 1.7];
        for (variant, sign) in [(Variant::Derived, 1.0), (Variant::AsPrinted, -1.0)] {
            let g = Geodesic::new(lambda, sigma, variant);
            let mut dy = [0.0; 4];
            g.rhs(0.0, &y, &mut dy);
            let tp = y[2] / y[3];
            let tpp = (dy[2] * y[3] - y[2] * dy[3]) / y[3].powi(3);
            let expected = sign * real_pow(y[0], lambda) * tp + y[1] * y[1] * real_pow(y[0], sigma);
            assert!((tpp - expected).abs() < 1e-13);
            if variant == Variant::Derived {
                assert!((tpp - drag.accel(y[1], y[0], tp)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn exponential_solves_third_order() {
        let eq = ThirdOrder::new(-1.0, -3.0);
        let y0 = 2.5;
        for z in [-1.0, 0.0, 0.5, 3.0] {
            let y = y0 * f64::exp(-z);
            assert!(eq.residual(y, -y, y, -y).abs() < 1e-12);
            assert!((eq.third_derivative(y, -y, y) + y).abs() < 1e-12);
        }
    }

    #[test]
    fn third_order_slope_guard() {
        let eq = ThirdOrder::new(1.0, 5.0);
        let g = &eq.guards()[0];
        assert!(g.eval(0.0, &[1.0, 1e-3, 0.0]) > 0.0);
        assert!(g.eval(0.0, &[1.0, -1e-12, 0.0]) < 0.0);
        let s = IntegratorSettings::adaptive(0.0, 1.0, 1e-9, 1e-12);
        let traj = integrate(&eq, &[1.0, 0.0, 1.0], &s);
        assert!(traj.is_err(), "division by a zero slope must not pass silently");
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("derived".parse::<Variant>().unwrap(), Variant::Derived);
        assert_eq!("as_printed".parse::<Variant>().unwrap(), Variant::AsPrinted);
        assert!("other".parse::<Variant>().is_err());
    }
}
