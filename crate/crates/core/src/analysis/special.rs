//! Special solutions of the autonomous third-order equation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::{real_pow, ThirdOrder};

pub const Y0_BRACKET: (f64, f64) = (1e-6, 1e6);

/// `λ⁻²(λY₀)^{4+4λ} - (λY₀)^{1+λ}(1+λ)^{3λ} - (1+λ)^{1+4λ}`.
pub fn power_condition(lambda: f64, y0: f64) -> f64 {
    let ly = lambda * y0;
    let l1 = 1.0 + lambda;
    real_pow(ly, 4.0 + 4.0 * lambda) / (lambda * lambda)
        - real_pow(ly, 1.0 + lambda) * real_pow(l1, 3.0 * lambda)
        - real_pow(l1, 1.0 + 4.0 * lambda)
}

/// Smallest positive root of [`power_condition`] in [`Y0_BRACKET`].
///
/// The bracket is scanned on a logarithmic grid for the first sign change,
/// which is then bisected to machine resolution.
pub fn power_solution_y0(lambda: f64) -> Result<f64> {
    if lambda == -1.0 {
        return Err(Error::ExponentialBranch);
    }
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Argument("lambda must be finite and nonzero".into()));
    }
    let (lo, hi) = Y0_BRACKET;
    let steps = 2400;
    let ratio = (hi / lo).powf(1.0 / steps as f64);
    let f = |y: f64| power_condition(lambda, y);
    let mut a = lo;
    let mut fa = f(a);
    for k in 1..=steps {
        let b = if k == steps { hi } else { lo * ratio.powi(k) };
        let fb = f(b);
        if fa == 0.0 {
            return Ok(a);
        }
        if fa.is_finite() && fb.is_finite() && fa.signum() != fb.signum() {
            return Ok(bisect(f, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    Err(Error::NoRoot { lambda, lo, hi })
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    if f(b).abs() < fa.abs() {
        b
    } else {
        a
    }
}

/// `Y = Y₀z^q` with `q = λ/(1+λ)` and its first three derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSolution {
    pub lambda: f64,
    pub y0: f64,
    pub exponent: f64,
}

impl PowerSolution {
    pub fn new(lambda: f64) -> Result<Self> {
        let y0 = power_solution_y0(lambda)?;
        Ok(Self {
            lambda,
            y0,
            exponent: lambda / (1.0 + lambda),
        })
    }

    /// `[Y, Y', Y'', Y''']` at `z > 0`.
    pub fn derivatives(&self, z: f64) -> [f64; 4] {
        let q = self.exponent;
        let c = [1.0, q, q * (q - 1.0), q * (q - 1.0) * (q - 2.0)];
        std::array::from_fn(|k| self.y0 * c[k] * z.powf(q - k as f64))
    }

    /// Residual of the third-order equation with `σ = 1 + 4λ`, divided through by `Y'`.
    pub fn residual(&self, z: f64) -> f64 {
        let eq = ThirdOrder::new(self.lambda, 1.0 + 4.0 * self.lambda);
        let [y, y1, y2, y3] = self.derivatives(z);
        y3 - eq.third_derivative(y, y1, y2)
    }
}

/// Residual of `Y = Y₀e^{-z}` in the third-order equation with `λ = -1`, `σ = -3`.
pub fn exponential_residual(y0: f64, z: f64) -> f64 {
    let eq = ThirdOrder::new(-1.0, -3.0);
    let y = y0 * (-z).exp();
    -y - eq.third_derivative(y, -y, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_one_root() {
        let y0 = power_solution_y0(1.0).unwrap();
        // Y₀⁸ - 8Y₀² - 32 = 0 has the single positive root 1.6451200346...
        assert!((y0 - 1.64512003464752).abs() < 1e-12, "{y0}");
        assert!((y0.powi(8) - 8.0 * y0 * y0 - 32.0).abs() < 1e-10);
        assert!(power_condition(1.0, y0).abs() < 1e-10);
    }

    #[test]
    fn other_roots() {
        for (lambda, expected) in [
            (2.0, 1.33778404981835),
            (0.5, 2.09936847253819),
            (3.0, 1.21922039627644),
        ] {
            let y0 = power_solution_y0(lambda).unwrap();
            assert!((y0 - expected).abs() < 1e-11, "{lambda}: {y0}");
        }
    }

    #[test]
    fn power_solution_residual() {
        for lambda in [1.0, 2.0, 0.5] {
            let s = PowerSolution::new(lambda).unwrap();
            for z in [1.0, 2.0, 4.0] {
                assert!(s.residual(z).abs() <= 1e-10, "{lambda} at {z}: {}", s.residual(z));
            }
        }
    }

    #[test]
    fn exponential_branch() {
        assert!(matches!(power_solution_y0(-1.0), Err(Error::ExponentialBranch)));
        for z in [0.0, 1.0, 3.0] {
            assert!(exponential_residual(1.7, z).abs() <= 1e-12);
        }
        assert!(power_solution_y0(0.0).is_err());
    }
}
