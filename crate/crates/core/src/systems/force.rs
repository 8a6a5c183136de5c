use serde::{Deserialize, Serialize};

use super::angle::AngleFunction;
use super::real_pow;
use crate::error::{Error, Result};
use crate::integrate::{Event, OdeSystem};

/// Planar force families. Components are per unit mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForceField {
    /// `F_r = -w²r + U/r³`, `F_θ = -V'/r³`
    Ermakov { w: f64, u: AngleFunction, v: AngleFunction },
    /// `F_r = -[(U'' + U)/r² + 2V'/r^{3/2}]`, `F_θ = -V/r^{3/2}`
    GorringeLeach { u: AngleFunction, v: AngleFunction },
    /// `F_θ = r^μ`
    Isotropic { mu: f64 },
    /// `F_θ = r^μ` plus the radial drag `r^ν·ṙ`
    IsotropicDrag { mu: f64, nu: f64 },
}

impl ForceField {
    /// The transverse force `sin θ / r³` of the worked Ermakov example.
    pub fn ermakov_example() -> Self {
        ForceField::Ermakov {
            w: 0.0,
            u: AngleFunction::Zero,
            v: AngleFunction::cos(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let params: Vec<f64> = match self {
            ForceField::Ermakov { w, .. } => vec![*w],
            ForceField::GorringeLeach { .. } => vec![],
            ForceField::Isotropic { mu } => vec![*mu],
            ForceField::IsotropicDrag { mu, nu } => vec![*mu, *nu],
        };
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Argument("force parameters must be finite".into()));
        }
        if let ForceField::Isotropic { mu } | ForceField::IsotropicDrag { mu, .. } = self {
            if *mu == -2.0 {
                return Err(Error::Argument(
                    "mu = -2 is excluded (torque maps divide by mu + 2)".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            ForceField::Ermakov { .. } => "ermakov",
            ForceField::GorringeLeach { .. } => "gorringe_leach",
            ForceField::Isotropic { .. } => "isotropic",
            ForceField::IsotropicDrag { .. } => "isotropic_drag",
        }
    }

    /// Position-dependent part of `(F_r, F_θ)`.
    fn positional(&self, r: f64, theta: f64) -> (f64, f64) {
        match self {
            ForceField::Ermakov { w, u, v } => {
                let r3 = r * r * r;
                (-w * w * r + u.value(theta) / r3, -v.derivative(theta, 1) / r3)
            }
            ForceField::GorringeLeach { u, v } => {
                let r32 = r * r.sqrt();
                let fr = -((u.derivative(theta, 2) + u.value(theta)) / (r * r) + 2.0 * v.derivative(theta, 1) / r32);
                (fr, -v.value(theta) / r32)
            }
            ForceField::Isotropic { mu } | ForceField::IsotropicDrag { mu, .. } => (0.0, real_pow(r, *mu)),
        }
    }

    /// Radial velocity-dependent force `f_d(r, ṙ)`; zero except for the drag family.
    pub fn drag(&self, r: f64, rdot: f64) -> f64 {
        match self {
            ForceField::IsotropicDrag { nu, .. } => real_pow(r, *nu) * rdot,
            _ => 0.0,
        }
    }

    /// `(F_r, F_θ)` at `(r, θ, ṙ)`, including drag.
    pub fn eval_force(&self, r: f64, theta: f64, rdot: f64) -> Result<(f64, f64)> {
        check_radius(r)?;
        let (fr, ft) = self.positional(r, theta);
        Ok((fr + self.drag(r, rdot), ft))
    }

    /// `(1/r)[∂(r F_θ)/∂r - ∂F_r/∂θ]` from analytic derivatives.
    ///
    /// The velocity-dependent drag has no position-only curl and is excluded.
    pub fn curl(&self, r: f64, theta: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(match self {
            ForceField::Ermakov { u, v, .. } => (2.0 * v.derivative(theta, 1) - u.derivative(theta, 1)) / r.powi(4),
            ForceField::GorringeLeach { u, v } => {
                (u.derivative(theta, 3) + u.derivative(theta, 1)) / r.powi(3)
                    + (0.5 * v.value(theta) + 2.0 * v.derivative(theta, 2)) / r.powf(2.5)
            }
            ForceField::Isotropic { mu } | ForceField::IsotropicDrag { mu, .. } => (mu + 1.0) * real_pow(r, mu - 1.0),
        })
    }

    /// Central-difference evaluation of the same curl expression.
    pub fn curl_fd(&self, r: f64, theta: f64, h: f64) -> Result<f64> {
        check_radius(r)?;
        if !(h > 0.0) || r - h <= 0.0 {
            return Err(Error::Domain(format!("finite-difference step {h} invalid at r = {r}")));
        }
        let rft = |rr: f64| rr * self.positional(rr, theta).1;
        let fr = |th: f64| self.positional(r, th).0;
        let d_rft = (rft(r + h) - rft(r - h)) / (2.0 * h);
        let d_fr = (fr(theta + h) - fr(theta - h)) / (2.0 * h);
        Ok((d_rft - d_fr) / r)
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be positive, got {r}")))
    }
}

/// Free-function form of [`ForceField::eval_force`].
pub fn eval_force(field: &ForceField, r: f64, theta: f64, rdot: f64) -> Result<(f64, f64)> {
    field.eval_force(r, theta, rdot)
}

/// Free-function form of [`ForceField::curl`].
pub fn curl(field: &ForceField, r: f64, theta: f64) -> Result<f64> {
    field.curl(r, theta)
}

/// Free-function form of [`ForceField::curl_fd`].
pub fn curl_fd(field: &ForceField, r: f64, theta: f64, h: f64) -> Result<f64> {
    field.curl_fd(r, theta, h)
}

pub const DEFAULT_R_FLOOR: f64 = 1e-8;

/// Polar equations of motion on the state `[r, θ, ṙ, θ̇]`:
/// `r̈ = rθ̇² + F_r + f_d`, `θ̈ = (F_θ - 2ṙθ̇)/r`.
#[derive(Debug, Clone)]
pub struct PolarRhs {
    pub field: ForceField,
    pub r_floor: f64,
}

impl PolarRhs {
    pub fn new(field: ForceField) -> Result<Self> {
        field.validate()?;
        Ok(Self {
            field,
            r_floor: DEFAULT_R_FLOOR,
        })
    }

    pub fn with_r_floor(mut self, r_floor: f64) -> Self {
        self.r_floor = r_floor;
        self
    }
}

/// Builds the polar vector field for `field`.
pub fn polar_rhs(field: &ForceField) -> Result<PolarRhs> {
    PolarRhs::new(field.clone())
}

impl OdeSystem for PolarRhs {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let (r, theta, rdot, thetadot) = (y[0], y[1], y[2], y[3]);
        match self.field.eval_force(r, theta, rdot) {
            Ok((fr, ft)) => {
                dy[0] = rdot;
                dy[1] = thetadot;
                dy[2] = r * thetadot * thetadot + fr;
                dy[3] = (ft - 2.0 * rdot * thetadot) / r;
            }
            Err(_) => dy.fill(f64::NAN),
        }
    }

    fn guards(&self) -> Vec<Event> {
        let floor = self.r_floor;
        vec![Event::new("r-floor", move |_, y| y[0] - floor)]
    }

    fn describe(&self) -> String {
        format!("polar:{}", self.field.name())
    }
}
