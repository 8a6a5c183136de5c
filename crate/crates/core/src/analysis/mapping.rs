//! Polar trajectories mapped to Emden–Fowler variables, and residual
//! reports that decide whether sampled curves satisfy a given equation.

use serde::{Deserialize, Serialize};

use super::particular::{check_mu, reference_term};
use crate::error::{Error, Result};
use crate::integrate::SecondOrderOde;
use crate::series::{fd_second_derivative, first_derivative, longest_monotone_segment, EFPoint, EFSeries};
use crate::state::{PolarState, Trajectory};
use crate::systems::{real_pow, Variant};

/// Summary of a pointwise residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub rms: f64,
    pub max: f64,
    /// Magnitude of the terms being balanced, used for relative thresholds.
    pub scale: f64,
    pub count: usize,
}

impl ResidualStats {
    pub fn from_residuals(residuals: &[f64], scale: f64) -> Result<Self> {
        if residuals.is_empty() {
            return Err(Error::Argument("no residual points".into()));
        }
        let n = residuals.len() as f64;
        let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
        let max = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        Ok(Self {
            rms,
            max,
            scale,
            count: residuals.len(),
        })
    }

    /// `max / max(scale, tiny)`.
    pub fn relative_max(&self) -> f64 {
        self.max / self.scale.max(f64::MIN_POSITIVE)
    }

    pub fn passes(&self, rel_tol: f64) -> bool {
        self.relative_max() <= rel_tol
    }
}

fn max_abs(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Maps an isotropic trajectory to `(J, T, T')`.
///
/// Unscaled: `T̃ = (r^{μ+2} - r0^{μ+2})/(μ+2)`, `J̃ = r²θ̇`, `T̃' = ṙ`.
/// Scaled: `T = (μ+2)T̃`, `J = (μ+2)^{1/4}J̃`, `T' = (μ+2)^{3/4}ṙ`, which
/// needs `μ + 2 > 0`. Only the longest monotone-`J` segment is kept.
pub fn torque_map(traj: &Trajectory, mu: f64, r0: f64, apply_scaling: bool) -> Result<EFSeries> {
    check_mu(mu)?;
    let a = mu + 2.0;
    if apply_scaling && a < 0.0 {
        return Err(Error::Domain("the (mu + 2) scaling is not real for mu < -2".into()));
    }
    let r0a = reference_term(mu, r0)?;
    let states = traj.polar_states()?;
    map_states(&states, a, r0a, apply_scaling, mu, r0)
}

fn map_states(states: &[PolarState], a: f64, r0a: f64, scaled: bool, mu: f64, r0: f64) -> Result<EFSeries> {
    let (sj, st, stp) = if scaled {
        (a.powf(0.25), a, a.powf(0.75))
    } else {
        (1.0, 1.0, 1.0)
    };
    let points = states
        .iter()
        .map(|s| {
            if s.r <= 0.0 {
                return Err(Error::Domain(format!("non-positive radius {} at t = {}", s.r, s.t)));
            }
            let t_tilde = (s.r.powf(a) - r0a) / a;
            Ok(EFPoint::new(sj * s.angular_momentum(), st * t_tilde, stp * s.rdot))
        })
        .collect::<Result<Vec<_>>>()?;
    EFSeries::from_samples(points, mu, r0, scaled)
}

/// Residual of `T'' = JⁿT^m` on a mapped series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfResidualReport {
    pub n: f64,
    pub m: f64,
    /// `|T''_fd - JⁿT^m|` at interior points.
    pub second: ResidualStats,
    /// `|ΔT/ΔJ - (T'_k + T'_{k+1})/2|` per interval.
    pub first: ResidualStats,
}

impl EfResidualReport {
    pub fn passes(&self, rel_tol: f64) -> bool {
        self.second.passes(rel_tol)
    }
}

/// Finite-difference residual of `T'' = JⁿT^m` along `series`.
pub fn ef_residual(series: &EFSeries, n: f64, m: f64) -> Result<EfResidualReport> {
    if series.len() < 3 {
        return Err(Error::Argument(format!("need at least 3 points, got {}", series.len())));
    }
    let fd = fd_second_derivative(series)?;
    let pts = &series.points;
    let rhs: Vec<f64> = pts[1..pts.len() - 1]
        .iter()
        .map(|p| real_pow(p.j, n) * real_pow(p.t, m))
        .collect();
    let res: Vec<f64> = fd.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let scale = max_abs(fd.iter().copied()).max(max_abs(rhs.iter().copied()));
    let first: Vec<f64> = pts
        .windows(2)
        .map(|w| (w[1].t - w[0].t) / (w[1].j - w[0].j) - 0.5 * (w[0].t_prime + w[1].t_prime))
        .collect();
    let first_scale = max_abs(pts.iter().map(|p| p.t_prime));
    Ok(EfResidualReport {
        n,
        m,
        second: ResidualStats::from_residuals(&res, scale)?,
        first: ResidualStats::from_residuals(&first, first_scale)?,
    })
}

/// Both candidate forms of the drag Emden–Fowler equation evaluated on a
/// mapped drag trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DragMapReport {
    pub mu: f64,
    pub nu: Option<f64>,
    /// `-(μ+4)/(μ+2)`
    pub lambda: f64,
    /// `ν/(μ+2)`
    pub sigma: Option<f64>,
    /// `(ν-μ-1)/(μ+2)`
    pub rho: Option<f64>,
    /// `T̃'' - T̃^λT̃' - J̃²T̃^σ`; absent without drag.
    pub printed: Option<ResidualStats>,
    /// `T̃'' - (aT̃)^λJ̃² - (aT̃)^ρT̃'` with `a = μ+2`.
    pub derived: ResidualStats,
    pub winner: Variant,
    pub points: usize,
    pub trimmed: bool,
}

/// Maps a drag trajectory with `T̃ = r^{μ+2}/(μ+2)`, `J̃ = r²θ̇`, `T̃' = ṙ`
/// and compares the printed and derived forms. `nu = None` means the run
/// had no drag term; only the derived form is then meaningful.
pub fn drag_map_residual(traj: &Trajectory, mu: f64, nu: Option<f64>) -> Result<DragMapReport> {
    check_mu(mu)?;
    let a = mu + 2.0;
    let lambda = -(mu + 4.0) / a;
    let states = traj.polar_states()?;
    let js: Vec<f64> = states.iter().map(|s| s.angular_momentum()).collect();
    let seg = longest_monotone_segment(&js);
    let trimmed = seg.len() != states.len();
    let mut kept: Vec<PolarState> = states[seg].to_vec();
    if kept.len() >= 2 && kept[1].angular_momentum() < kept[0].angular_momentum() {
        kept.reverse();
    }
    if kept.len() < 3 {
        return Err(Error::Argument("monotone segment has fewer than 3 points".into()));
    }
    let j: Vec<f64> = kept.iter().map(|s| s.angular_momentum()).collect();
    // r^a stays positive even where T̃ = r^a/a is negative
    let ra: Vec<f64> = kept.iter().map(|s| s.r.powf(a)).collect();
    let t: Vec<f64> = ra.iter().map(|x| x / a).collect();
    let tp: Vec<f64> = kept.iter().map(|s| s.rdot).collect();
    let fd = crate::series::second_derivative(&j, &t)?;
    let interior = 1..kept.len() - 1;

    let rho = nu.map(|nu| (nu - mu - 1.0) / a);
    let derived_rhs: Vec<f64> = interior
        .clone()
        .map(|i| {
            let drag = rho.map_or(0.0, |rho| ra[i].powf(rho) * tp[i]);
            ra[i].powf(lambda) * j[i] * j[i] + drag
        })
        .collect();
    let derived = stats_against(&fd, &derived_rhs)?;

    let sigma = nu.map(|nu| nu / a);
    let printed = match sigma {
        Some(sigma) => {
            let rhs: Vec<f64> = interior
                .map(|i| real_pow(t[i], lambda) * tp[i] + j[i] * j[i] * real_pow(t[i], sigma))
                .collect();
            Some(stats_against(&fd, &rhs)?)
        }
        None => None,
    };
    let winner = match &printed {
        Some(p) if p.rms.is_finite() && !(derived.rms <= p.rms) => Variant::AsPrinted,
        _ => Variant::Derived,
    };
    Ok(DragMapReport {
        mu,
        nu,
        lambda,
        sigma,
        rho,
        printed,
        derived,
        winner,
        points: kept.len(),
        trimmed,
    })
}

fn stats_against(lhs: &[f64], rhs: &[f64]) -> Result<ResidualStats> {
    let res: Vec<f64> = lhs.iter().zip(rhs).map(|(a, b)| a - b).collect();
    let scale = max_abs(lhs.iter().copied()).max(max_abs(rhs.iter().copied()));
    ResidualStats::from_residuals(&res, scale)
}

/// Residual of the Abel equation in `(w, u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbelReport {
    pub lambda: f64,
    pub stats: ResidualStats,
    pub points: usize,
    pub trimmed: bool,
}

/// Residual of `(λu + w)·du/dw - (1 + λ(1 + w^λ))u - λw^{1+4λ}` along a
/// solution of the drag equation with `σ = 1 + 4λ`, where
/// `w = J^{1/λ}T`, `u = J^{(λ+1)/λ}T'` and `du/dw` is a finite difference.
///
/// `ef_solution` holds `[T, T']` against `J`.
pub fn abel_reduction_residual(lambda: f64, ef_solution: &Trajectory) -> Result<AbelReport> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Argument("lambda must be finite and nonzero".into()));
    }
    if ef_solution.dim() != 2 {
        return Err(Error::Argument("expected a [T, T'] trajectory".into()));
    }
    let (p, q) = (1.0 / lambda, (lambda + 1.0) / lambda);
    let mut w = Vec::with_capacity(ef_solution.len());
    let mut u = Vec::with_capacity(ef_solution.len());
    for (&j, y) in ef_solution.times().iter().zip(ef_solution.states()) {
        if !(j > 0.0) {
            return Err(Error::Domain(format!("J must be positive, got {j}")));
        }
        w.push(j.powf(p) * y[0]);
        u.push(j.powf(q) * y[1]);
    }
    let seg = longest_monotone_segment(&w);
    let trimmed = seg.len() != w.len();
    let (w, u) = (&w[seg.clone()], &u[seg]);
    if w.len() < 3 {
        return Err(Error::Argument("monotone w segment has fewer than 3 points".into()));
    }
    let du = first_derivative(w, u)?;
    let mut res = Vec::with_capacity(du.len());
    let mut scale = 0.0f64;
    for (i, d) in du.iter().enumerate() {
        let (wi, ui) = (w[i + 1], u[i + 1]);
        let lhs = (lambda * ui + wi) * d;
        let lin = (1.0 + lambda * (1.0 + real_pow(wi, lambda))) * ui;
        let src = lambda * real_pow(wi, 1.0 + 4.0 * lambda);
        scale = scale.max(lhs.abs()).max(lin.abs()).max(src.abs());
        res.push(lhs - lin - src);
    }
    Ok(AbelReport {
        lambda,
        stats: ResidualStats::from_residuals(&res, scale)?,
        points: w.len(),
        trimmed,
    })
}

/// Checks that `T_ε(J) = αT(βJ)` solves `ode` when `T` does.
///
/// Uses the nodes `s_k` of `solution` (state `[T, T']` against `J`) and
/// evaluates the equation at `J_k = s_k/β` with `T_ε = αT(s_k)`,
/// `T_ε' = αβT'(s_k)`, `T_ε'' = αβ²T''(s_k)`.
pub fn scaled_solution_residual(
    solution: &Trajectory,
    ode: &dyn SecondOrderOde,
    alpha: f64,
    beta: f64,
) -> Result<ResidualStats> {
    if solution.dim() != 2 {
        return Err(Error::Argument("expected a [T, T'] trajectory".into()));
    }
    if !(alpha.is_finite() && beta.is_finite() && beta != 0.0) {
        return Err(Error::Argument(
            "scaling factors must be finite and beta nonzero".into(),
        ));
    }
    let mut res = Vec::with_capacity(solution.len());
    let mut scale = 0.0f64;
    for ((&s, y), dy) in solution
        .times()
        .iter()
        .zip(solution.states())
        .zip(solution.derivatives())
    {
        let j = s / beta;
        let lhs = alpha * beta * beta * dy[1];
        let rhs = ode.accel(j, alpha * y[0], alpha * beta * y[1]);
        scale = scale.max(lhs.abs()).max(rhs.abs());
        res.push(lhs - rhs);
    }
    ResidualStats::from_residuals(&res, scale)
}
