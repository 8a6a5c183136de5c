//! Adaptive Simpson quadrature and the orbit/time quadratures on the
//! power-law branch.

use serde::{Deserialize, Serialize};

use super::particular::{check_mu, reference_term, ParticularSolution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

pub const MAX_DEPTH: u32 = 60;
pub const MAX_EVALUATIONS: usize = 5_000_000;
/// Per-interval tolerances stop halving at this fraction of the requested one.
pub const TOL_FLOOR_FACTOR: f64 = 1.0 / (1u64 << 30) as f64;
/// Relative offset used when an endpoint evaluation is not finite.
pub const ENDPOINT_OFFSET: f64 = 1e-12;

struct Simpson<'f> {
    f: &'f dyn Fn(f64) -> f64,
    to_x: &'f dyn Fn(f64) -> f64,
    tol_floor: f64,
    evals: usize,
    err: f64,
    failure: Option<&'static str>,
}

impl Simpson<'_> {
    fn eval(&mut self, u: f64) -> f64 {
        self.evals += 1;
        (self.f)(u)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let flm = self.eval(lm);
        let frm = self.eval(rm);
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let both = left + right;
        let delta = both - whole;
        if !delta.is_finite() {
            self.failure
                .get_or_insert("integrand is not finite inside the interval");
            return both;
        }
        let converged =
            delta.abs() <= 15.0 * tol || delta.abs() <= 4.0 * f64::EPSILON * both.abs() || self.unresolved(a, b);
        if converged || self.failure.is_some() {
            self.err += delta.abs() / 15.0;
            return both + delta / 15.0;
        }
        if depth >= MAX_DEPTH || lm <= a || rm >= b {
            self.failure.get_or_insert("no convergence within the bisection limit");
            self.err += delta.abs() / 15.0;
            return both + delta / 15.0;
        }
        if self.evals > MAX_EVALUATIONS {
            self.failure.get_or_insert("evaluation budget exhausted");
            self.err += delta.abs() / 15.0;
            return both + delta / 15.0;
        }
        // below the floor the integrand's own rounding noise dominates
        let sub_tol = (0.5 * tol).max(self.tol_floor);
        self.refine(a, m, fa, flm, fm, left, sub_tol, depth + 1)
            + self.refine(m, b, fm, frm, fb, right, sub_tol, depth + 1)
    }

    /// True once the image of `[ua, ub]` is too narrow for `f` to see
    /// anything but rounding noise.
    fn unresolved(&self, ua: f64, ub: f64) -> bool {
        let (xa, xb) = ((self.to_x)(ua), (self.to_x)(ub));
        (xb - xa).abs() <= 64.0 * f64::EPSILON * xa.abs().max(xb.abs())
    }
}

/// `∫_a^b f` to absolute tolerance `tol`.
///
/// The integrand is composed with `x = a + (b-a)(3u² - 2u³)`, whose
/// vanishing derivative at both ends absorbs integrable endpoint
/// singularities such as `x^{-1/2}`. Where the composed integrand is
/// still not finite at an end, it is taken at the point a relative
/// distance [`ENDPOINT_OFFSET`] inside the interval.
pub fn quad_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Argument(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Argument("tolerance must be positive".into()));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let w = b - a;
    let smooth = |u: f64| u * u * (3.0 - 2.0 * u);
    // measure from the nearer end so points close to b keep their precision
    let to_x = |u: f64| {
        if u <= 0.5 {
            a + w * smooth(u)
        } else {
            b - w * smooth(1.0 - u)
        }
    };
    let g = |u: f64| f(to_x(u)) * 6.0 * w * u * (1.0 - u);
    // parameter at which x sits ENDPOINT_OFFSET·(b-a) inside the interval
    let u_eps = (ENDPOINT_OFFSET / 3.0).sqrt();
    let g_safe = |u: f64| {
        let v = g(u);
        if v.is_finite() {
            v
        } else if u < u_eps {
            g(u_eps)
        } else if u > 1.0 - u_eps {
            g(1.0 - u_eps)
        } else {
            v
        }
    };
    let mut s = Simpson {
        f: &g_safe,
        to_x: &to_x,
        tol_floor: tol * TOL_FLOOR_FACTOR,
        evals: 0,
        err: 0.0,
        failure: None,
    };
    let (fa, fm, fb) = (s.eval(0.0), s.eval(0.5), s.eval(1.0));
    let whole = (fa + 4.0 * fm + fb) / 6.0;
    let value = if whole.is_finite() {
        s.refine(0.0, 1.0, fa, fm, fb, whole, tol, 0)
    } else {
        s.failure = Some("integrand is not finite");
        f64::NAN
    };
    match s.failure {
        Some(reason) => Err(Error::Quadrature {
            a,
            b,
            reason: reason.to_string(),
            partial_value: value,
        }),
        None => Ok(QuadratureResult {
            value,
            abs_error_estimate: s.err,
            evaluations: s.evals,
        }),
    }
}

/// Default absolute tolerance for the branch quadratures.
pub const BRANCH_TOL: f64 = 1e-12;

/// Quadratures along `T = ΛJ^p` for `F_θ = r^μ` (`n = 2`) in the scaled
/// variables `T = r^{μ+2} - r0^{μ+2}`, `J = (T/Λ)^{1/p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchQuadrature {
    pub mu: f64,
    pub r0: f64,
    pub branch: ParticularSolution,
    pub tol: f64,
}

impl BranchQuadrature {
    pub fn new(mu: f64, r0: f64) -> Result<Self> {
        check_mu(mu)?;
        let branch = ParticularSolution::for_mu(mu)?;
        if branch.lambda == 0.0 {
            return Err(Error::Domain("trivial branch (Lambda = 0) has no orbit".into()));
        }
        reference_term(mu, r0)?;
        Ok(Self {
            mu,
            r0,
            branch,
            tol: BRANCH_TOL,
        })
    }

    fn a(&self) -> f64 {
        self.mu + 2.0
    }

    /// `(1 - m)/(n + 2)`, the reciprocal of the branch exponent.
    fn k(&self) -> f64 {
        1.0 / self.branch.exponent
    }

    /// `r^{μ+2} - r0^{μ+2}`.
    pub fn bracket(&self, r: f64) -> f64 {
        r.powf(self.a()) - self.r0.powf(self.a())
    }

    pub fn j(&self, r: f64) -> f64 {
        (self.bracket(r) / self.branch.lambda).powf(self.k())
    }

    /// `J/(r²T'(J))` with `J = J(r)`.
    pub fn theta_integrand(&self, r: f64) -> f64 {
        let j = self.j(r);
        j / (r * r * self.branch.t_prime(j))
    }

    /// The closed form printed for `dθ/dr`:
    /// `k Λ^{-2k} B^{-2(n+m+3)/(n+2)}` with `B` the bracket.
    pub fn theta_integrand_printed(&self, r: f64) -> f64 {
        let (k, m) = (self.k(), self.branch.m);
        k * self.branch.lambda.powf(-2.0 * k) * self.bracket(r).powf(-2.0 * (m + 5.0) / 4.0)
    }

    /// `(dJ/dr)/(r f(r))` with `f = r^μ`.
    pub fn time_integrand(&self, r: f64) -> f64 {
        let (k, l) = (self.k(), self.branch.lambda);
        let dj_dr = k / l * (self.bracket(r) / l).powf(k - 1.0) * self.a() * r.powf(self.mu + 1.0);
        dj_dr / r.powf(self.mu + 1.0)
    }

    /// The printed time integrand `k(μ+2)Λ^{(n+m+1)/(n+2)} B^{-(n+m+3)/(n+2)}`.
    pub fn time_integrand_printed(&self, r: f64) -> f64 {
        let (k, m) = (self.k(), self.branch.m);
        k * self.a() * self.branch.lambda.powf((m + 3.0) / 4.0) * self.bracket(r).powf(-(m + 5.0) / 4.0)
    }

    /// Factor turning the scaled-variable angle into the physical angle,
    /// `(μ+2)^{n/(n+2)}`; `None` when it is not real.
    pub fn theta_scale(&self) -> Option<f64> {
        (self.a() > 0.0).then(|| self.a().sqrt())
    }

    /// Factor turning `τ` into physical time, `(μ+2)^{-1/(n+2)}`.
    pub fn time_scale(&self) -> Option<f64> {
        (self.a() > 0.0).then(|| self.a().powf(-0.25))
    }

    fn cumulative(
        &self,
        r_grid: &[f64],
        chain: impl Fn(f64) -> f64,
        printed: impl Fn(f64) -> f64,
        scale: Option<f64>,
    ) -> Result<Vec<QuadPoint>> {
        check_grid(r_grid)?;
        for &r in r_grid {
            if self.bracket(r) < 0.0 {
                return Err(Error::Domain(format!("r = {r} lies below the reference radius")));
            }
        }
        let mut out = Vec::with_capacity(r_grid.len());
        let (mut acc, mut acc_printed, mut err) = (0.0, Some(0.0), 0.0);
        for (i, &r) in r_grid.iter().enumerate() {
            if i > 0 {
                let lo = r_grid[i - 1];
                let q = quad_adaptive(&chain, lo, r, self.tol)?;
                acc += q.value;
                err += q.abs_error_estimate;
                acc_printed = match (acc_printed, quad_adaptive(&printed, lo, r, self.tol)) {
                    (Some(p), Ok(q)) => Some(p + q.value),
                    _ => None,
                };
            }
            let ratio = printed(r) / chain(r);
            out.push(QuadPoint {
                r,
                scaled: acc,
                physical: scale.map(|s| s * acc),
                printed: acc_printed,
                integrand_ratio: ratio.is_finite().then_some(ratio),
                abs_error_estimate: err,
            });
        }
        Ok(out)
    }

    /// Cumulative `θ` from `r_grid[0]`.
    pub fn theta_of_r(&self, r_grid: &[f64]) -> Result<Vec<QuadPoint>> {
        self.cumulative(
            r_grid,
            |r| self.theta_integrand(r),
            |r| self.theta_integrand_printed(r),
            self.theta_scale(),
        )
    }

    /// Cumulative `τ` from `r_grid[0]`, with `τ0 = 0`.
    pub fn time_of_r(&self, r_grid: &[f64]) -> Result<Vec<QuadPoint>> {
        self.cumulative(
            r_grid,
            |r| self.time_integrand(r),
            |r| self.time_integrand_printed(r),
            self.time_scale(),
        )
    }
}

fn check_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() {
        return Err(Error::Argument("empty radius grid".into()));
    }
    if r_grid.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::Domain("radii must be positive and finite".into()));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("radius grid must be strictly increasing".into()));
    }
    Ok(())
}

/// One grid point of a cumulative branch quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadPoint {
    pub r: f64,
    /// Integral of the chain integrand in the scaled variables.
    pub scaled: f64,
    /// The same value in physical units, when the scaling is real.
    pub physical: Option<f64>,
    /// Integral of the printed closed form, when it converges.
    pub printed: Option<f64>,
    /// Printed integrand over chain integrand at `r`.
    pub integrand_ratio: Option<f64>,
    pub abs_error_estimate: f64,
}

/// `θ(r)` on the power-law branch, measured from `r_grid[0]`.
pub fn orbit_theta_of_r(mu: f64, r0: f64, r_grid: &[f64]) -> Result<Vec<QuadPoint>> {
    BranchQuadrature::new(mu, r0)?.theta_of_r(r_grid)
}

/// `τ(r)` on the power-law branch, measured from `r_grid[0]`.
pub fn time_of_r(mu: f64, r0: f64, r_grid: &[f64]) -> Result<Vec<QuadPoint>> {
    BranchQuadrature::new(mu, r0)?.time_of_r(r_grid)
}
