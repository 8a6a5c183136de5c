//! Noether condition on a grid, the resulting integral, and its drift.

use curlforce_core::invariants::{
    default_grid, ef_integral_m5, ef_integral_m7, noether_integral, noether_residual, GeneratorSpec, PowerLagrangian,
    M7_COEFF,
};
use curlforce_core::systems::real_pow;
use curlforce_core::{drift_metric, solve_orbit_ode, Event, IntegratorSettings, SecondOrderOde};
use serde::Serialize;

use super::{numerical, Context};
use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{to_sorted_json, write_file, DriftRecord, Manifest, RunRecord};

/// Euler–Lagrange equation `T'' = k·JⁿT^m` of a power Lagrangian.
struct ElEquation(PowerLagrangian);

impl SecondOrderOde for ElEquation {
    fn accel(&self, j: f64, t: f64, _tp: f64) -> f64 {
        let l = &self.0;
        if l.coupling == 0.0 {
            0.0
        } else {
            l.coupling * real_pow(j, l.n) * real_pow(t, l.m)
        }
    }

    fn guards(&self) -> Vec<Event> {
        if self.0.coupling != 0.0 && self.0.m < 0.0 {
            vec![Event::new("t-floor", |_, y| y[0] - 1e-10)]
        } else {
            Vec::new()
        }
    }

    fn describe(&self) -> String {
        format!("euler-lagrange(n={},m={},k={})", self.0.n, self.0.m, self.0.coupling)
    }
}

#[derive(Debug, Serialize)]
struct Comparison {
    against: String,
    max_abs_difference: f64,
}

#[derive(Debug, Serialize)]
struct NoetherReport {
    lagrangian: PowerLagrangian,
    generator: GeneratorSpec,
    grid_points: usize,
    max_residual: f64,
    noetherian: bool,
    integral: String,
    drift: f64,
    warning: Option<String>,
    comparisons: Vec<Comparison>,
}

fn compare(
    name: &str,
    f: impl Fn(f64, f64, f64) -> f64,
    g: impl Fn(f64, f64, f64) -> Option<f64>,
) -> Option<Comparison> {
    let mut worst = 0.0f64;
    for (j, t, tp) in default_grid() {
        worst = worst.max((f(j, t, tp) - g(j, t, tp)?).abs());
    }
    Some(Comparison {
        against: name.to_string(),
        max_abs_difference: worst,
    })
}

pub fn run(cfg: &RunConfig, ctx: &Context, manifest: &mut Manifest) -> Result<()> {
    let opts = cfg
        .noether
        .clone()
        .ok_or_else(|| CliError::Config("missing 'noether'".into()))?;
    let mut lagrangian = PowerLagrangian::new(opts.n, opts.m)?;
    lagrangian.coupling = opts.coupling;
    let generator = opts.generator.resolve()?;
    let grid = default_grid();
    let residuals = noether_residual(&lagrangian, &generator, &grid)?;
    let integral = noether_integral(&lagrangian, &generator)?;
    let max_residual = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));

    let [j0, j1] = opts.run.j_span;
    let settings = cfg.integrator.settings(Some(opts.run.j_span), ctx.max_steps)?;
    let settings = IntegratorSettings {
        t_span: (j0, j1),
        ..settings
    };
    let traj = solve_orbit_ode(&ElEquation(lagrangian), opts.run.t0, opts.run.tp0, &settings).map_err(numerical)?;
    manifest.runs.push(RunRecord::new("euler-lagrange", &traj));
    let values: Vec<f64> = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&j, y)| integral.eval(j, y[0], y[1]))
        .collect();
    let drift = drift_metric(&values).map_err(numerical)?;
    manifest.invariants.push(DriftRecord {
        name: "noether_integral".into(),
        initial: values[0],
        drift,
    });

    let [a0, a1, a2] = generator.xi;
    let [b0, b1] = generator.eta;
    let [c, c0] = generator.gauge;
    let description = format!(
        "I = V - xi*L - (eta - T'*xi)*2T' with xi = {a0} + {a1}J + {a2}J^2, eta = ({b0} + {b1}J)T, V = {c}T^2 + {c0}, \
         L = T'^2 + {k}*(2/({m}+1))*J^{n}*T^({m}+1)",
        k = lagrangian.coupling,
        n = lagrangian.n,
        m = lagrangian.m,
    );

    let mut comparisons = Vec::new();
    if lagrangian.coupling == 1.0 && lagrangian.n == 2.0 && lagrangian.m == -5.0 {
        comparisons.extend(compare(
            "ef_integral_m5",
            |j, t, tp| integral.eval(j, t, tp),
            |j, t, tp| ef_integral_m5(j, t, tp).ok(),
        ));
    }
    if lagrangian.coupling == 1.0 && lagrangian.n == 2.0 && lagrangian.m == -7.0 {
        let third = compare(
            "ef_integral_m7(c=1/3)",
            |j, t, tp| integral.eval(j, t, tp),
            |j, t, tp| ef_integral_m7(j, t, tp, M7_COEFF).ok(),
        );
        let one = compare(
            "ef_integral_m7(c=1)",
            |j, t, tp| integral.eval(j, t, tp),
            |j, t, tp| ef_integral_m7(j, t, tp, 1.0).ok(),
        );
        if let (Some(a), Some(b)) = (&third, &one) {
            if a.max_abs_difference < b.max_abs_difference {
                manifest.discrepancies.push(
                    "the constructed integral is T'(JT' - T) + J^3/(3T^6); the coefficient 1 on J^3/T^6 is not conserved"
                        .into(),
                );
            }
        }
        comparisons.extend(third);
        comparisons.extend(one);
    }

    let report = NoetherReport {
        lagrangian,
        generator,
        grid_points: grid.len(),
        max_residual,
        noetherian: integral.noetherian,
        integral: if integral.noetherian {
            description
        } else {
            format!("not Noetherian: {description}")
        },
        drift,
        warning: integral.warning.clone(),
        comparisons,
    };
    let name = "noether.json";
    write_file(&ctx.out_dir.join(name), &to_sorted_json(&report))?;
    manifest.outputs.push(name.into());
    manifest.report("noether", &report);
    Ok(())
}
