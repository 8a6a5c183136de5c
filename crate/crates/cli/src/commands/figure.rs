//! ψ(θ) data for the three figure families of the cosine system.

use curlforce_core::state::Termination;
use curlforce_core::systems::PsiEquation;
use curlforce_core::{solve_orbit_ode, IntegratorSettings, Trajectory, Variant};
use serde::Serialize;

use super::{numerical, Context};
use crate::config::{FigureKind, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{Cell, Manifest, RunRecord, Table};

pub const DEFAULT_THETA_SPAN: [f64; 2] = [0.0, 20.0];
/// Initial `(ψ, ψ')` for the first two figures.
pub const DEFAULT_INITIAL: [f64; 2] = [0.1, 0.1];

pub fn default_levels(which: FigureKind) -> Vec<f64> {
    match which {
        FigureKind::Fig1 => vec![1.1, 1.2, 2.0],
        // the caption's "I=1.1" sits under "smaller than minus one"
        FigureKind::Fig2 => vec![-1.1, -1.2, -2.0],
        FigureKind::Fig3 => vec![-1.0, 0.5],
    }
}

pub fn default_initial(which: FigureKind) -> Vec<[f64; 2]> {
    match which {
        FigureKind::Fig3 => vec![[0.1, 0.1], [-0.1, 0.1], [0.1, -0.1]],
        _ => vec![DEFAULT_INITIAL],
    }
}

#[derive(Debug, Clone, Serialize)]
struct CurveReport {
    curve: usize,
    level: f64,
    psi0: f64,
    dpsi0: f64,
    termination: Termination,
    event: Option<String>,
    theta_end: f64,
    full_span: bool,
    max_abs_psi: f64,
    /// Max |ψ_derived - ψ_as_printed| over the common θ-range.
    variant_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
struct FigureReport {
    which: FigureKind,
    variant: Variant,
    theta_span: [f64; 2],
    levels: Vec<f64>,
    initial: Vec<[f64; 2]>,
    curves: Vec<CurveReport>,
}

fn solve(level: f64, ic: [f64; 2], variant: Variant, settings: &IntegratorSettings) -> Result<Trajectory> {
    let eq = PsiEquation::cosine(level, variant);
    solve_orbit_ode(&eq, ic[0], ic[1], settings).map_err(numerical)
}

fn gap(a: &Trajectory, b: &Trajectory) -> f64 {
    let end = b.t_span().1;
    a.times()
        .iter()
        .zip(a.states())
        .filter(|(&th, _)| th <= end)
        .filter_map(|(&th, y)| b.state_at(th).ok().map(|z| (y[0] - z[0]).abs()))
        .fold(0.0, f64::max)
}

pub fn run(cfg: &RunConfig, ctx: &Context, manifest: &mut Manifest) -> Result<()> {
    let opts = cfg.figure.clone().unwrap_or_default();
    let which = ctx
        .which
        .or(opts.which)
        .ok_or_else(|| CliError::Config("figure needs --which or 'figure.which'".into()))?;
    let variant = ctx.variant(cfg);
    let levels = opts.levels.unwrap_or_else(|| default_levels(which));
    let initial = opts.initial.unwrap_or_else(|| default_initial(which));
    let theta_span = opts.theta_span.unwrap_or(DEFAULT_THETA_SPAN);
    let settings = cfg.integrator.settings(Some(theta_span), ctx.max_steps)?;
    let settings = IntegratorSettings {
        t_span: (theta_span[0], theta_span[1]),
        ..settings
    };
    settings.validate()?;
    let other = match variant {
        Variant::Derived => Variant::AsPrinted,
        Variant::AsPrinted => Variant::Derived,
    };

    let mut table = Table::new(["curve", "I", "theta", "psi", "dpsi"]);
    let mut curves = Vec::new();
    for &level in &levels {
        for &ic in &initial {
            let k = curves.len();
            let traj = solve(level, ic, variant, &settings)?;
            let alt = solve(level, ic, other, &settings)?;
            for (&th, y) in traj.times().iter().zip(traj.states()) {
                table.push(vec![Cell::from(k), level.into(), th.into(), y[0].into(), y[1].into()]);
            }
            let theta_end = traj.t_span().1;
            let report = CurveReport {
                curve: k,
                level,
                psi0: ic[0],
                dpsi0: ic[1],
                termination: traj.meta.termination,
                event: traj.events.first().map(|e| e.name.clone()),
                theta_end,
                full_span: traj.meta.termination == Termination::Completed,
                max_abs_psi: traj.states().iter().map(|y| y[0].abs()).fold(0.0, f64::max),
                variant_gap: gap(&traj, &alt),
            };
            if report.variant_gap > 1e-3 {
                manifest.discrepancies.push(format!(
                    "curve {k} (I = {level}): derived and as_printed differ by max|dpsi| = {:.3e}",
                    report.variant_gap
                ));
            }
            manifest.runs.push(RunRecord::new(format!("curve {k}"), &traj));
            curves.push(report);
        }
    }
    manifest
        .outputs
        .push(table.write(&ctx.out_dir, which.as_str(), ctx.format)?);
    manifest.report(
        "figure",
        &FigureReport {
            which,
            variant,
            theta_span,
            levels,
            initial,
            curves,
        },
    );
    Ok(())
}
