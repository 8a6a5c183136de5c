use curlforce_core::analysis::{
    drag_map_residual, ef_residual, orbit_theta_of_r, seed_polar_from_particular, time_of_r, torque_map,
    ParticularSolution,
};
use curlforce_core::invariants::{ef_integral_m5, ef_integral_m7, M7_COEFF};
use curlforce_core::systems::polar_rhs;
use curlforce_core::{drift_metric, integrate, EFSeries, Event, ForceField, IntegratorSettings, Trajectory, Variant};

fn fixed_run(field: ForceField, y0: [f64; 4], t1: f64, h: f64) -> Trajectory {
    let rhs = polar_rhs(&field).unwrap();
    integrate(&rhs, &y0, &IntegratorSettings::fixed(0.0, t1, h)).unwrap()
}

fn series_drift(series: &EFSeries, f: impl Fn(f64, f64, f64) -> f64) -> f64 {
    let values: Vec<f64> = series.points.iter().map(|p| f(p.j, p.t, p.t_prime)).collect();
    drift_metric(&values).unwrap()
}

#[test]
fn mapped_mu_minus_three_halves_run_solves_m5_equation() {
    let traj = fixed_run(ForceField::Isotropic { mu: -1.5 }, [1.0, 0.0, 0.2, 1.0], 10.0, 1e-3);
    let series = torque_map(&traj, -1.5, 0.0, true).unwrap();
    assert!(!series.trimmed);
    let report = ef_residual(&series, 2.0, -5.0).unwrap();
    assert!(report.passes(1e-4), "{report:?}");
    let drift = series_drift(&series, |j, t, tp| ef_integral_m5(j, t, tp).unwrap());
    assert!(drift <= 1e-6, "drift {drift:e}");
}

#[test]
fn mapped_mu_minus_five_thirds_run_solves_m7_equation() {
    let traj = fixed_run(
        ForceField::Isotropic { mu: -5.0 / 3.0 },
        [1.0, 0.0, 0.2, 1.0],
        10.0,
        1e-3,
    );
    let series = torque_map(&traj, -5.0 / 3.0, 0.0, true).unwrap();
    let report = ef_residual(&series, 2.0, -7.0).unwrap();
    assert!(report.passes(1e-4), "{report:?}");
    let good = series_drift(&series, |j, t, tp| ef_integral_m7(j, t, tp, M7_COEFF).unwrap());
    let printed = series_drift(&series, |j, t, tp| ef_integral_m7(j, t, tp, 1.0).unwrap());
    assert!(good <= 1e-6, "c=1/3 drift {good:e}");
    assert!(printed > 1e-2, "c=1 drift {printed:e}");
}

#[test]
fn mapped_run_fails_the_wrong_exponent() {
    let traj = fixed_run(ForceField::Isotropic { mu: -1.5 }, [1.0, 0.0, 0.2, 1.0], 10.0, 1e-3);
    let series = torque_map(&traj, -1.5, 0.0, true).unwrap();
    let report = ef_residual(&series, 2.0, -4.0).unwrap();
    assert!(!report.passes(1e-2));
}

/// Seeded polar run on the particular branch, stopped once `J` has grown tenfold.
fn branch_run(mu: f64, j1: f64) -> Trajectory {
    let seed = seed_polar_from_particular(mu, 0.0, j1).unwrap();
    let a = mu + 2.0;
    let stop = 10.0 * j1;
    let settings = IntegratorSettings::adaptive(0.0, 1e4, 1e-12, 1e-14)
        .with_event(Event::new("j-decade", move |_, y| {
            a.powf(0.25) * y[0] * y[0] * y[3] - stop
        }));
    integrate(
        &polar_rhs(&ForceField::Isotropic { mu }).unwrap(),
        &seed.to_array(),
        &settings,
    )
    .unwrap()
}

#[test]
fn seeded_runs_stay_on_the_particular_branch() {
    for mu in [0.0, 0.5] {
        let j1 = 1.0;
        let traj = branch_run(mu, j1);
        assert!(!traj.events.is_empty(), "mu={mu} never reached 10·J1");
        let branch = ParticularSolution::for_mu(mu).unwrap();
        let series = torque_map(&traj, mu, 0.0, true).unwrap();
        assert!(series.points.last().unwrap().j >= 9.999 * j1);
        for p in &series.points {
            let expected = branch.t(p.j);
            assert!(
                (p.t - expected).abs() <= 1e-5 * expected,
                "mu={mu} J={}: {} vs {expected}",
                p.j,
                p.t
            );
        }
    }
}

#[test]
fn branch_quadratures_match_simulation() {
    for mu in [0.0, 0.5] {
        let traj = branch_run(mu, 1.0);
        let states = traj.polar_states().unwrap();
        let stride = (states.len() / 40).max(1);
        let picked: Vec<_> = states.iter().step_by(stride).copied().collect();
        let grid: Vec<f64> = picked.iter().map(|s| s.r).collect();
        let thetas = orbit_theta_of_r(mu, 0.0, &grid).unwrap();
        let times = time_of_r(mu, 0.0, &grid).unwrap();
        let (th0, t0) = (picked[0].theta, picked[0].t);
        for ((s, th), tm) in picked.iter().zip(&thetas).zip(&times).skip(1) {
            let sim_th = s.theta - th0;
            let sim_t = s.t - t0;
            let q_th = th.physical.unwrap();
            let q_t = tm.physical.unwrap();
            assert!(
                (q_th - sim_th).abs() <= 1e-4 * sim_th.abs(),
                "mu={mu} r={}: θ {q_th} vs {sim_th}",
                s.r
            );
            assert!(
                (q_t - sim_t).abs() <= 1e-4 * sim_t.abs(),
                "mu={mu} r={}: t {q_t} vs {sim_t}",
                s.r
            );
        }
    }
}

#[test]
fn derived_drag_form_wins() {
    let field = ForceField::IsotropicDrag { mu: -1.5, nu: -1.0 };
    let traj = fixed_run(field, [1.0, 0.0, 0.2, 1.0], 8.0, 1e-3);
    let report = drag_map_residual(&traj, -1.5, Some(-1.0)).unwrap();
    assert!(report.derived.passes(1e-3), "{report:?}");
    assert_eq!(report.winner, Variant::Derived);
    let printed = report.printed.unwrap();
    assert!(printed.relative_max() > report.derived.relative_max());
}

#[test]
fn drag_report_for_eight_symmetry_case() {
    let field = ForceField::IsotropicDrag { mu: -4.0, nu: 2.0 };
    // the velocity term is anti-damping here, so keep the span short of the blow-up
    let traj = fixed_run(field, [1.0, 0.0, 0.1, 1.0], 1.0, 1e-3);
    let report = drag_map_residual(&traj, -4.0, Some(2.0)).unwrap();
    assert_eq!(report.lambda, 0.0);
    assert_eq!(report.sigma, Some(-1.0));
    assert!(report.printed.is_some());
    assert!(
        report.derived.rms.is_finite() && report.derived.passes(1e-3),
        "{report:?}"
    );
}

#[test]
fn zero_drag_limit_reduces_to_emden_fowler() {
    let traj = fixed_run(ForceField::Isotropic { mu: -1.5 }, [1.0, 0.0, 0.2, 1.0], 8.0, 1e-3);
    let report = drag_map_residual(&traj, -1.5, None).unwrap();
    assert!(report.printed.is_none());
    assert!(report.derived.passes(1e-4), "{report:?}");
}
