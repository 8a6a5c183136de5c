//! The power-law branch `T = ΛJ^p`, `p = (n+2)/(1-m)`, of `T'' = JⁿT^m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::PolarState;
use crate::systems::real_pow;

/// `Λ = [(n+2)(n+m+1)/(m-1)²]^{1/(m-1)}`.
///
/// A zero base returns `Λ = 0`, the trivial solution, even though the
/// formal power is infinite for `m < 1`. A negative base has a real root
/// only when `m - 1` is an odd integer.
pub fn lambda_coeff(n: f64, m: f64) -> Result<f64> {
    if m == 1.0 {
        return Err(Error::Argument("m = 1 has no power-law branch".into()));
    }
    if !(n.is_finite() && m.is_finite()) {
        return Err(Error::Argument("exponents must be finite".into()));
    }
    let base = (n + 2.0) * (n + m + 1.0) / ((m - 1.0) * (m - 1.0));
    let e = 1.0 / (m - 1.0);
    if base == 0.0 {
        Ok(0.0)
    } else if base > 0.0 {
        Ok(base.powf(e))
    } else {
        let q = m - 1.0;
        if q.fract() == 0.0 && (q as i64) % 2 != 0 {
            Ok(-(-base).powf(e))
        } else {
            Err(Error::NonRealLambda { n, m, base })
        }
    }
}

/// `m = -(μ+4)/(μ+2)` for the isotropic force `r^μ`.
pub fn ef_exponent(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok(-(mu + 4.0) / (mu + 2.0))
}

pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if mu == -2.0 {
        Err(Error::Argument("mu = -2 is excluded".into()))
    } else if !mu.is_finite() {
        Err(Error::Argument("mu must be finite".into()))
    } else {
        Ok(())
    }
}

/// `T(J) = ΛJ^p` with `p = (n+2)/(1-m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticularSolution {
    pub n: f64,
    pub m: f64,
    pub lambda: f64,
    pub exponent: f64,
}

impl ParticularSolution {
    pub fn new(n: f64, m: f64) -> Result<Self> {
        let lambda = lambda_coeff(n, m)?;
        Ok(Self {
            n,
            m,
            lambda,
            exponent: (n + 2.0) / (1.0 - m),
        })
    }

    /// The branch reached from `F_θ = r^μ` (`n = 2`).
    pub fn for_mu(mu: f64) -> Result<Self> {
        Self::new(2.0, ef_exponent(mu)?)
    }

    pub fn t(&self, j: f64) -> f64 {
        self.lambda * j.powf(self.exponent)
    }

    pub fn t_prime(&self, j: f64) -> f64 {
        self.lambda * self.exponent * j.powf(self.exponent - 1.0)
    }

    pub fn t_second(&self, j: f64) -> f64 {
        let p = self.exponent;
        self.lambda * p * (p - 1.0) * j.powf(p - 2.0)
    }

    /// `T'' - JⁿT^m` on the branch.
    pub fn residual(&self, j: f64) -> f64 {
        self.t_second(j) - real_pow(j, self.n) * real_pow(self.t(j), self.m)
    }

    /// Inverse of [`t`](Self::t): `J = (T/Λ)^{1/p}`.
    pub fn j_of_t(&self, t: f64) -> Result<f64> {
        if self.lambda == 0.0 {
            return Err(Error::Domain("trivial branch (Lambda = 0) cannot be inverted".into()));
        }
        let ratio = t / self.lambda;
        if ratio < 0.0 {
            return Err(Error::Domain(format!(
                "T = {t} is not reachable on the branch with Lambda = {}",
                self.lambda
            )));
        }
        Ok(ratio.powf(1.0 / self.exponent))
    }
}

/// `r0^{μ+2}`, with `r0 = ∞` allowed when `μ + 2 < 0`.
pub(crate) fn reference_term(mu: f64, r0: f64) -> Result<f64> {
    let a = mu + 2.0;
    if r0.is_nan() || r0 < 0.0 {
        return Err(Error::Domain(format!(
            "reference radius must be non-negative, got {r0}"
        )));
    }
    if r0.is_infinite() && a > 0.0 {
        return Err(Error::Domain("r0 = inf needs mu + 2 < 0".into()));
    }
    if r0 == 0.0 && a < 0.0 {
        return Err(Error::Domain("r0 = 0 needs mu + 2 > 0".into()));
    }
    Ok(r0.powf(a))
}

/// `J = [(r^{μ+2} - r0^{μ+2})/Λ]^{(1-m)/(n+2)}`.
pub fn j_of_r(r: f64, mu: f64, r0: f64, n: f64, m: f64) -> Result<f64> {
    check_mu(mu)?;
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let branch = ParticularSolution::new(n, m)?;
    let bracket = r.powf(mu + 2.0) - reference_term(mu, r0)?;
    if bracket < 0.0 {
        return Err(Error::Domain(format!("r^(mu+2) - r0^(mu+2) = {bracket} is negative")));
    }
    branch.j_of_t(bracket)
}

/// Polar state at `θ = 0`, `t = 0` whose mapped image is the branch point
/// `(J1, ΛJ1^p, T'(J1))` for `F_θ = r^μ`.
pub fn seed_polar_from_particular(mu: f64, r0: f64, j1: f64) -> Result<PolarState> {
    let branch = ParticularSolution::for_mu(mu)?;
    let a = mu + 2.0;
    if a < 0.0 {
        return Err(Error::Domain("the (mu + 2) scaling is not real for mu < -2".into()));
    }
    if !(branch.lambda > 0.0) {
        return Err(Error::Domain(format!(
            "branch coefficient Lambda = {} is not positive",
            branch.lambda
        )));
    }
    if !(j1 > 0.0) {
        return Err(Error::Domain(format!(
            "seed angular momentum must be positive, got {j1}"
        )));
    }
    let t1 = branch.t(j1);
    let tp1 = branch.t_prime(j1);
    let r1 = (t1 + reference_term(mu, r0)?).powf(1.0 / a);
    PolarState::new(0.0, r1, 0.0, a.powf(-0.75) * tp1, a.powf(-0.25) * j1 / (r1 * r1))
}
