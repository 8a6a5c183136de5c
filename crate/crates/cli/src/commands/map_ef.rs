//! Polar run → Emden–Fowler variables, with residual and drift reports.

use curlforce_core::analysis::{drag_map_residual, ef_exponent, ef_residual, torque_map};
use curlforce_core::invariants::{ef_integral_m5, ef_integral_m7, M7_COEFF};
use curlforce_core::systems::PolarRhs;
use curlforce_core::{EFSeries, ForceField, InvariantReport};

use super::simulate::crash_reason;
use super::{integrate_keep_partial, Context};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{Cell, DriftRecord, Manifest, RunRecord, Table};

/// Pass threshold for the second-derivative residual, relative to its scale.
pub const EF_REL_TOL: f64 = 1e-4;
/// Pass threshold of the drag-form residuals.
pub const DRAG_REL_TOL: f64 = 1e-3;

fn drift(name: &str, series: &EFSeries, f: impl Fn(f64, f64, f64) -> Option<f64>) -> Option<DriftRecord> {
    let values: Option<Vec<f64>> = series.points.iter().map(|p| f(p.j, p.t, p.t_prime)).collect();
    InvariantReport::new(name, values?).ok().map(|r| DriftRecord::from(&r))
}

pub fn run(cfg: &RunConfig, ctx: &Context, manifest: &mut Manifest) -> Result<()> {
    let field = cfg.system()?.clone();
    let (mu, nu) = match field {
        ForceField::Isotropic { mu } => (mu, None),
        ForceField::IsotropicDrag { mu, nu } => (mu, Some(nu)),
        _ => {
            return Err(CliError::Config(
                "map-ef needs an isotropic or isotropic_drag system".into(),
            ))
        }
    };
    let opts = cfg.map_ef.clone().unwrap_or_default();
    let s0 = cfg.initial_state()?;
    let settings = cfg.integrator.settings(None, ctx.max_steps)?;
    let rhs = PolarRhs::new(field)?;
    let (traj, failure) = integrate_keep_partial(&rhs, &s0.to_array(), &settings)?;
    manifest.runs.push(RunRecord::new(&cfg.name, &traj));
    if let Some(msg) = failure.or_else(|| crash_reason(&traj)) {
        return Err(CliError::Numerical(msg));
    }

    let series = match nu {
        None => {
            let series = torque_map(&traj, mu, opts.r0.0, opts.scaled)?;
            let m = ef_exponent(mu)?;
            let report = ef_residual(&series, 2.0, m)?;
            manifest.report("ef_residual", &report);
            manifest.report("ef_residual_pass", &report.passes(EF_REL_TOL));
            if !opts.scaled {
                manifest.discrepancies.push(
                    "unscaled variables carry constant factors; the residual is against the unit-coefficient equation"
                        .into(),
                );
            }
            if m == -5.0 {
                manifest.invariants.extend(drift("ef_integral_m5", &series, |j, t, tp| {
                    ef_integral_m5(j, t, tp).ok()
                }));
            }
            if m == -7.0 {
                let third = drift("ef_integral_m7(c=1/3)", &series, |j, t, tp| {
                    ef_integral_m7(j, t, tp, M7_COEFF).ok()
                });
                let one = drift("ef_integral_m7(c=1)", &series, |j, t, tp| {
                    ef_integral_m7(j, t, tp, 1.0).ok()
                });
                if let (Some(a), Some(b)) = (&third, &one) {
                    if b.drift > a.drift {
                        manifest.discrepancies.push(format!(
                            "m = -7 integral: c = 1 drifts by {:.3e}, c = 1/3 by {:.3e}",
                            b.drift, a.drift
                        ));
                    }
                }
                manifest.invariants.extend(third);
                manifest.invariants.extend(one);
            }
            series
        }
        Some(nu) => {
            let report = drag_map_residual(&traj, mu, Some(nu))?;
            manifest.report("drag_map_residual", &report);
            manifest.report("derived_form_pass", &report.derived.passes(DRAG_REL_TOL));
            if let Some(printed) = &report.printed {
                if !printed.passes(DRAG_REL_TOL) {
                    manifest.discrepancies.push(format!(
                        "printed drag form residual {:.3e} of scale exceeds {DRAG_REL_TOL:e}",
                        printed.relative_max()
                    ));
                }
            }
            // T̃ = r^a/a: the reference term vanishes at r0 = 0 for a > 0, at r0 = ∞ for a < 0
            let r0 = if mu + 2.0 > 0.0 { 0.0 } else { f64::INFINITY };
            torque_map(&traj, mu, r0, false)?
        }
    };

    let mut table = Table::new(["J", "T", "Tprime"]);
    for p in &series.points {
        table.push(vec![Cell::from(p.j), p.t.into(), p.t_prime.into()]);
    }
    manifest.outputs.push(table.write(&ctx.out_dir, "ef", ctx.format)?);
    manifest.report("series_trimmed", &series.trimmed);
    Ok(())
}
