//! Special solutions of the third-order equation and the scaling map of
//! the drag Emden–Fowler family.

use curlforce_core::analysis::{
    abel_reduction_residual, exponential_residual, power_condition, scaled_solution_residual, AbelReport,
    PowerSolution, ResidualStats,
};
use curlforce_core::systems::drag_ef_rhs;
use curlforce_core::{solve_orbit_ode, IntegratorSettings};
use serde::Serialize;

use super::{numerical, Context};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{to_sorted_json, write_file, Manifest, RunRecord};

/// Pass threshold of the scaling-map residual.
pub const SCALING_REL_TOL: f64 = 1e-6;
/// Pass threshold of the Abel reduction residual.
pub const ABEL_REL_TOL: f64 = 1e-3;

#[derive(Debug, Serialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
enum Solution {
    Exponential {
        y0: f64,
        max_residual: f64,
    },
    Power {
        y0: f64,
        exponent: f64,
        condition_residual: f64,
        max_residual: f64,
    },
}

#[derive(Debug, Serialize)]
struct Scaling {
    epsilon: f64,
    alpha: f64,
    beta: f64,
    symmetry_expected: bool,
    stats: ResidualStats,
    passes: bool,
}

#[derive(Debug, Serialize)]
struct SpecialReport {
    lambda: f64,
    sigma: f64,
    z: Vec<f64>,
    solution: Solution,
    scaling: Scaling,
    abel: Option<AbelReport>,
    abel_passes: Option<bool>,
}

pub fn run(cfg: &RunConfig, ctx: &Context, manifest: &mut Manifest) -> Result<()> {
    let opts = cfg
        .special
        .clone()
        .ok_or_else(|| CliError::Config("missing 'special'".into()))?;
    let lambda = opts.lambda;
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(CliError::Config("special needs a finite nonzero lambda".into()));
    }
    let sigma = opts.sigma.unwrap_or(1.0 + 4.0 * lambda);
    let max_abs = |v: Vec<f64>| v.into_iter().fold(0.0f64, |a, r| a.max(r.abs()));

    let solution = if lambda == -1.0 {
        let y0 = 1.0;
        Solution::Exponential {
            y0,
            max_residual: max_abs(opts.z.iter().map(|&z| exponential_residual(y0, z)).collect()),
        }
    } else {
        let p = PowerSolution::new(lambda)?;
        Solution::Power {
            y0: p.y0,
            exponent: p.exponent,
            condition_residual: power_condition(lambda, p.y0),
            max_residual: max_abs(opts.z.iter().map(|&z| p.residual(z)).collect()),
        }
    };

    let [j0, j1] = opts.run.j_span;
    let settings = cfg.integrator.settings(Some(opts.run.j_span), ctx.max_steps)?;
    let settings = IntegratorSettings {
        t_span: (j0, j1),
        ..settings
    };
    let ode = drag_ef_rhs(lambda, sigma);
    let traj = solve_orbit_ode(&ode, opts.run.t0, opts.run.tp0, &settings).map_err(numerical)?;
    manifest.runs.push(RunRecord::new("drag-emden-fowler", &traj));
    let alpha = (-opts.epsilon).exp();
    let beta = (-lambda * opts.epsilon).exp();
    let stats = scaled_solution_residual(&traj, &ode, alpha, beta)?;
    let symmetry_expected = sigma == 1.0 + 4.0 * lambda;
    let scaling = Scaling {
        epsilon: opts.epsilon,
        alpha,
        beta,
        symmetry_expected,
        stats,
        passes: stats.passes(SCALING_REL_TOL),
    };
    if !symmetry_expected {
        manifest.discrepancies.push(format!(
            "sigma = {sigma} differs from 1 + 4*lambda; scaling-map residual {:.3e} of scale",
            stats.relative_max()
        ));
    }

    // the reduction needs fine uniform steps for its finite differences
    let mut abel = None;
    if symmetry_expected {
        let fine = IntegratorSettings::fixed(j0, j1, (j1 - j0) / 4000.0);
        let sol = solve_orbit_ode(&ode, opts.run.t0, opts.run.tp0, &fine).map_err(numerical)?;
        let report = abel_reduction_residual(lambda, &sol)?;
        if !report.stats.passes(ABEL_REL_TOL) {
            manifest.discrepancies.push(format!(
                "Abel reduction residual {:.3e} of scale exceeds {ABEL_REL_TOL:e}",
                report.stats.relative_max()
            ));
        }
        abel = Some(report);
    }

    let report = SpecialReport {
        lambda,
        sigma,
        z: opts.z.clone(),
        solution,
        scaling,
        abel_passes: abel.map(|a| a.stats.passes(ABEL_REL_TOL)),
        abel,
    };
    let name = "special.json";
    write_file(&ctx.out_dir.join(name), &to_sorted_json(&report))?;
    manifest.outputs.push(name.into());
    manifest.report("special", &report);
    Ok(())
}
