use curlforce_core::invariants::{lrr_invariant, mu3_invariant};
use curlforce_core::state::Termination;
use curlforce_core::systems::PolarRhs;
use curlforce_core::{ForceField, InvariantReport, PolarState, Trajectory};

use super::{integrate_keep_partial, Context};
use crate::config::{InvariantKind, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{Cell, DriftRecord, Manifest, RunRecord, Table};

type Evaluator = Box<dyn Fn(&PolarState) -> f64>;

fn evaluator(kind: InvariantKind, field: &ForceField) -> Result<(&'static str, Evaluator)> {
    match (kind, field) {
        (InvariantKind::Lrr, ForceField::Ermakov { v, .. }) => {
            let v = v.clone();
            Ok(("lrr", Box::new(move |s| lrr_invariant(s, &v))))
        }
        (InvariantKind::Mu3, ForceField::Isotropic { mu } | ForceField::IsotropicDrag { mu, .. }) if *mu == -3.0 => {
            Ok(("mu3", Box::new(mu3_invariant)))
        }
        (InvariantKind::AngularMomentum, _) => Ok(("angular_momentum", Box::new(|s| s.angular_momentum()))),
        (kind, field) => Err(CliError::Config(format!(
            "invariant {kind:?} is not defined for the {} family with these parameters",
            field.name()
        ))),
    }
}

/// Why a finished run still counts as a failure.
pub(crate) fn crash_reason(traj: &Trajectory) -> Option<String> {
    let (_, t_end) = traj.t_span();
    match traj.meta.termination {
        Termination::StepUnderflow => Some(format!("step size underflow at t = {t_end}")),
        Termination::Event => traj
            .events
            .iter()
            .find(|e| e.name == "r-floor")
            .map(|e| format!("radius reached the floor at t = {}", e.t)),
        Termination::Completed => None,
    }
}

pub fn run(cfg: &RunConfig, ctx: &Context, manifest: &mut Manifest) -> Result<()> {
    let field = cfg.system()?.clone();
    let s0 = cfg.initial_state()?;
    let settings = cfg.integrator.settings(None, ctx.max_steps)?;
    let opts = cfg.simulate.clone().unwrap_or_default();
    let evaluators = opts
        .invariants
        .iter()
        .map(|&k| evaluator(k, &field))
        .collect::<Result<Vec<_>>>()?;

    let rhs = PolarRhs::new(field)?;
    let (traj, failure) = integrate_keep_partial(&rhs, &s0.to_array(), &settings)?;
    let failure = failure.or_else(|| crash_reason(&traj));

    let states = traj.polar_states()?;
    let mut columns = vec!["t", "r", "theta", "rdot", "thetadot"];
    columns.extend(evaluators.iter().map(|(name, _)| *name));
    let mut table = Table::new(columns);
    for s in &states {
        let mut row: Vec<Cell> = vec![s.t.into(), s.r.into(), s.theta.into(), s.rdot.into(), s.thetadot.into()];
        row.extend(evaluators.iter().map(|(_, f)| Cell::Float(f(s))));
        table.push(row);
    }
    manifest
        .outputs
        .push(table.write(&ctx.out_dir, "trajectory", ctx.format)?);
    manifest.runs.push(RunRecord::new(&cfg.name, &traj));
    for (name, f) in &evaluators {
        let values: Vec<f64> = states.iter().map(f).collect();
        if let Ok(report) = InvariantReport::new(*name, values) {
            manifest.invariants.push(DriftRecord::from(&report));
        }
    }
    match failure {
        Some(msg) => Err(CliError::Numerical(msg)),
        None => Ok(()),
    }
}
