use serde::{Deserialize, Serialize};

/// Angular profile functions `U(θ)`, `V(θ)` with analytic derivatives to third order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AngleFunction {
    Zero,
    Constant {
        c: f64,
    },
    /// `c·θ`
    LinearTheta {
        c: f64,
    },
    /// `c·cos(kθ)`
    Cos {
        c: f64,
        k: f64,
    },
    /// `c·sin(kθ)`
    Sin {
        c: f64,
        k: f64,
    },
    /// `c0 + c1·θ + c2·θ² + c3·θ³`
    Poly {
        coeffs: [f64; 4],
    },
}

impl AngleFunction {
    pub fn cos() -> Self {
        AngleFunction::Cos { c: 1.0, k: 1.0 }
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.derivative(theta, 0)
    }

    /// `d^order/dθ^order` for `order` in 0..=3; higher orders are not available.
    pub fn derivative(&self, theta: f64, order: u8) -> f64 {
        assert!(order <= 3, "angle functions carry derivatives up to third order");
        match *self {
            AngleFunction::Zero => 0.0,
            AngleFunction::Constant { c } => {
                if order == 0 {
                    c
                } else {
                    0.0
                }
            }
            AngleFunction::LinearTheta { c } => match order {
                0 => c * theta,
                1 => c,
                _ => 0.0,
            },
            AngleFunction::Cos { c, k } => {
                let (s, co) = (k * theta).sin_cos();
                let kp = k.powi(order as i32);
                c * kp
                    * match order {
                        0 => co,
                        1 => -s,
                        2 => -co,
                        _ => s,
                    }
            }
            AngleFunction::Sin { c, k } => {
                let (s, co) = (k * theta).sin_cos();
                let kp = k.powi(order as i32);
                c * kp
                    * match order {
                        0 => s,
                        1 => co,
                        2 => -s,
                        _ => -co,
                    }
            }
            AngleFunction::Poly {
                coeffs: [c0, c1, c2, c3],
            } => match order {
                0 => c0 + theta * (c1 + theta * (c2 + theta * c3)),
                1 => c1 + theta * (2.0 * c2 + 3.0 * c3 * theta),
                2 => 2.0 * c2 + 6.0 * c3 * theta,
                _ => 6.0 * c3,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            AngleFunction::Zero => true,
            AngleFunction::Constant { c } | AngleFunction::LinearTheta { c } => c == 0.0,
            AngleFunction::Cos { c, .. } | AngleFunction::Sin { c, .. } => c == 0.0,
            AngleFunction::Poly { coeffs } => coeffs.iter().all(|c| *c == 0.0),
        }
    }
}
