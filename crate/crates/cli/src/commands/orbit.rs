//! Branch quadratures θ(r), τ(r) with the printed closed forms alongside.

use curlforce_core::analysis::{seed_polar_from_particular, BranchQuadrature, QuadPoint};
use curlforce_core::systems::PolarRhs;
use curlforce_core::{integrate, Event, ForceField, IntegratorSettings, Trajectory};
use serde::Serialize;

use super::{numerical, Context};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{Cell, Manifest, RunRecord, Table};

#[derive(Debug, Serialize)]
struct OrbitReport {
    quadrature: BranchQuadrature,
    points: usize,
    theta_monotone: bool,
    tau_monotone: bool,
    max_abs_error_estimate: f64,
    /// Range of printed/chain integrand ratios over the grid.
    theta_ratio_range: Option<[f64; 2]>,
    tau_ratio_range: Option<[f64; 2]>,
    simulation: Option<SimulationReport>,
}

#[derive(Debug, Serialize)]
struct SimulationReport {
    theta_max_rel_diff: f64,
    t_max_rel_diff: f64,
}

fn ratio_range(points: &[QuadPoint]) -> Option<[f64; 2]> {
    let ratios: Vec<f64> = points.iter().filter_map(|p| p.integrand_ratio).collect();
    if ratios.is_empty() {
        return None;
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some([lo, hi])
}

fn monotone(points: &[QuadPoint]) -> bool {
    points.windows(2).all(|w| w[1].scaled >= w[0].scaled)
}

/// Time at which the increasing radius of `traj` first reaches `r`.
fn time_at_radius(traj: &Trajectory, r: f64) -> Option<f64> {
    let k = traj.states().iter().position(|y| y[0] >= r)?;
    if k == 0 {
        return Some(traj.times()[0]);
    }
    let (mut lo, mut hi) = (traj.times()[k - 1], traj.times()[k]);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if traj.state_at(mid).ok()?[0] < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn opt(x: Option<f64>) -> Cell {
    Cell::Float(x.unwrap_or(f64::NAN))
}

pub fn run(cfg: &RunConfig, ctx: &Context, manifest: &mut Manifest) -> Result<()> {
    let opts = cfg
        .orbit
        .clone()
        .ok_or_else(|| CliError::Config("missing 'orbit'".into()))?;
    let grid = opts.r_grid.points()?;
    let bq = BranchQuadrature::new(opts.mu, opts.r0.0)?;
    let thetas = bq.theta_of_r(&grid)?;
    let taus = bq.time_of_r(&grid)?;

    let mut sim: Option<Vec<(f64, f64)>> = None;
    if opts.simulate {
        if opts.mu + 2.0 <= 0.0 {
            return Err(CliError::Config("simulated comparison needs mu > -2".into()));
        }
        let j1 = bq.j(grid[0]);
        let seed = seed_polar_from_particular(opts.mu, opts.r0.0, j1)?;
        let r_end = *grid.last().unwrap();
        let base = cfg.integrator.settings(Some([0.0, 1e6]), ctx.max_steps)?;
        let settings = IntegratorSettings {
            rel_tol: base.rel_tol.min(1e-12),
            abs_tol: base.abs_tol.min(1e-14),
            ..base
        }
        .with_event(Event::new("r-end", move |_, y| y[0] - r_end));
        let rhs = PolarRhs::new(ForceField::Isotropic { mu: opts.mu })?;
        let traj = integrate(&rhs, &seed.to_array(), &settings).map_err(numerical)?;
        manifest.runs.push(RunRecord::new("branch-seeded", &traj));
        let rows = grid
            .iter()
            .map(|&r| {
                let t = time_at_radius(&traj, r)
                    .ok_or_else(|| CliError::Numerical(format!("simulation never reached r = {r}")))?;
                let theta = traj.state_at(t).map_err(numerical)?[1];
                Ok((theta, t))
            })
            .collect::<Result<Vec<_>>>()?;
        sim = Some(rows);
    }

    let mut columns = vec![
        "r",
        "theta",
        "tau",
        "theta_physical",
        "t_physical",
        "theta_printed",
        "tau_printed",
        "theta_ratio",
        "tau_ratio",
    ];
    if sim.is_some() {
        columns.extend(["theta_sim", "t_sim"]);
    }
    let mut table = Table::new(columns);
    let (mut th_diff, mut t_diff) = (0.0f64, 0.0f64);
    for (i, (th, ta)) in thetas.iter().zip(&taus).enumerate() {
        let mut row = vec![
            Cell::from(th.r),
            th.scaled.into(),
            ta.scaled.into(),
            opt(th.physical),
            opt(ta.physical),
            opt(th.printed),
            opt(ta.printed),
            opt(th.integrand_ratio),
            opt(ta.integrand_ratio),
        ];
        if let Some(rows) = &sim {
            let (theta_sim, t_sim) = rows[i];
            row.push(theta_sim.into());
            row.push(t_sim.into());
            if i > 0 {
                let rel = |q: Option<f64>, s: f64| q.map_or(f64::NAN, |q| (q - s).abs() / s.abs());
                th_diff = th_diff.max(rel(th.physical, theta_sim));
                t_diff = t_diff.max(rel(ta.physical, t_sim));
            }
        }
        table.push(row);
    }
    manifest.outputs.push(table.write(&ctx.out_dir, "orbit", ctx.format)?);

    let report = OrbitReport {
        quadrature: bq,
        points: grid.len(),
        theta_monotone: monotone(&thetas),
        tau_monotone: monotone(&taus),
        max_abs_error_estimate: thetas
            .iter()
            .chain(&taus)
            .map(|p| p.abs_error_estimate)
            .fold(0.0, f64::max),
        theta_ratio_range: ratio_range(&thetas),
        tau_ratio_range: ratio_range(&taus),
        simulation: sim.map(|_| SimulationReport {
            theta_max_rel_diff: th_diff,
            t_max_rel_diff: t_diff,
        }),
    };
    for (name, range) in [("theta", report.theta_ratio_range), ("tau", report.tau_ratio_range)] {
        if let Some([lo, hi]) = range {
            if (lo - 1.0).abs() > 1e-9 || (hi - 1.0).abs() > 1e-9 {
                manifest.discrepancies.push(format!(
                    "printed {name} integrand differs from the chain integrand by a factor in [{lo:.6e}, {hi:.6e}]"
                ));
            }
        }
    }
    manifest.report("orbit", &report);
    Ok(())
}
