use curlforce_core::invariants::{
    default_grid, ef_integral_m5, ef_integral_m7, lrr_invariant, mu3_invariant, noether_integral, noether_residual,
    prop31_integral, GeneratorSpec, PowerLagrangian, M7_COEFF,
};
use curlforce_core::systems::{ef_rhs, polar_rhs};
use curlforce_core::{
    drift_metric, integrate, solve_orbit_ode, AngleFunction, ForceField, IntegratorSettings, Trajectory,
};

fn polar_run(field: ForceField, y0: [f64; 4], t1: f64) -> Trajectory {
    let rhs = polar_rhs(&field).unwrap();
    integrate(&rhs, &y0, &IntegratorSettings::adaptive(0.0, t1, 1e-10, 1e-12)).unwrap()
}

fn ef_run(n: f64, m: f64, j0: f64, t0: f64, tp0: f64, j1: f64) -> Trajectory {
    let settings = IntegratorSettings::adaptive(j0, j1, 1e-12, 1e-14);
    solve_orbit_ode(&ef_rhs(n, m), t0, tp0, &settings).unwrap()
}

fn along(traj: &Trajectory, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
    traj.times()
        .iter()
        .zip(traj.states())
        .map(|(&j, y)| f(j, y[0], y[1]))
        .collect()
}

#[test]
fn lrr_invariant_drift() {
    let traj = polar_run(ForceField::ermakov_example(), [1.0, 0.0, 0.1, 0.5], 100.0);
    assert_eq!(traj.t_span().1, 100.0);
    let v = AngleFunction::cos();
    let values: Vec<f64> = traj
        .polar_states()
        .unwrap()
        .iter()
        .map(|s| lrr_invariant(s, &v))
        .collect();
    let drift = drift_metric(&values).unwrap();
    assert!(drift <= 1e-8, "drift {drift:e}");
}

#[test]
fn mu3_invariant_drift() {
    let traj = polar_run(ForceField::Isotropic { mu: -3.0 }, [1.0, 0.0, 0.1, 1.0], 30.0);
    let values: Vec<f64> = traj.polar_states().unwrap().iter().map(mu3_invariant).collect();
    let drift = drift_metric(&values).unwrap();
    assert!(drift <= 1e-8, "drift {drift:e}");
}

#[test]
fn angular_momentum_of_free_particle() {
    let free = ForceField::Ermakov {
        w: 0.0,
        u: AngleFunction::Zero,
        v: AngleFunction::Zero,
    };
    let traj = polar_run(free, [1.0, 0.3, -0.4, 0.7], 10.0);
    let l: Vec<f64> = traj
        .polar_states()
        .unwrap()
        .iter()
        .map(|s| s.angular_momentum())
        .collect();
    assert!(drift_metric(&l).unwrap() <= 1e-9);
}

#[test]
fn torque_rate_equals_transverse_force_moment() {
    // d(r²θ̇)/dt = r·F_θ = r^{μ+1}
    for mu in [-1.5, 0.0, 0.5] {
        let traj = polar_run(ForceField::Isotropic { mu }, [1.0, 0.0, 0.2, 1.0], 5.0);
        for (y, dy) in traj.states().iter().zip(traj.derivatives()) {
            let (r, rd, thd) = (y[0], y[2], y[3]);
            let rate = 2.0 * r * rd * thd + r * r * dy[3];
            let expected = r.powf(mu + 1.0);
            assert!(
                (rate - expected).abs() <= 1e-10 * expected.max(1.0),
                "mu={mu}: {rate} vs {expected}"
            );
        }
    }
}

#[test]
fn m5_integral_drift() {
    let traj = ef_run(2.0, -5.0, 1.0, 1.0, 0.0, 5.0);
    let values = along(&traj, |j, t, tp| ef_integral_m5(j, t, tp).unwrap());
    assert!(drift_metric(&values).unwrap() <= 1e-8);
}

#[test]
fn m7_integral_only_conserved_with_one_third() {
    for (t0, tp0) in [(1.0, 0.0), (1.2, 0.3)] {
        let traj = ef_run(2.0, -7.0, 1.0, t0, tp0, 3.0);
        let good = along(&traj, |j, t, tp| ef_integral_m7(j, t, tp, M7_COEFF).unwrap());
        let printed = along(&traj, |j, t, tp| ef_integral_m7(j, t, tp, 1.0).unwrap());
        let good = drift_metric(&good).unwrap();
        let printed = drift_metric(&printed).unwrap();
        assert!(good <= 1e-8, "c=1/3 drift {good:e}");
        assert!(printed > 1e-2, "c=1 drift {printed:e}");
    }
}

#[test]
fn prop31_drift_when_exponents_sum_to_minus_three() {
    for (n, m, t0, tp0) in [(2.0, -5.0, 1.0, 0.0), (0.0, -3.0, 1.0, 0.5), (1.0, -4.0, 0.8, 0.1)] {
        let traj = ef_run(n, m, 1.0, t0, tp0, 4.0);
        let values = along(&traj, |j, t, tp| prop31_integral(j, t, tp, n, m, -1.0).unwrap());
        let drift = drift_metric(&values).unwrap();
        assert!(drift <= 1e-8, "({n},{m}) drift {drift:e}");
    }
}

#[test]
fn prop31_drifts_off_the_constraint() {
    let traj = ef_run(2.0, -4.0, 1.0, 1.0, 0.0, 4.0);
    let values = along(&traj, |j, t, tp| prop31_integral(j, t, tp, 2.0, -4.0, -1.0).unwrap());
    assert!(drift_metric(&values).unwrap() > 1e-3);
}

#[test]
fn prop31_is_half_the_m5_integral() {
    for &(j, t, tp) in &default_grid() {
        let a = prop31_integral(j, t, tp, 2.0, -5.0, -1.0).unwrap();
        let b = ef_integral_m5(j, t, tp).unwrap();
        assert!((a - 0.5 * b).abs() <= 1e-12 * b.abs().max(1.0));
    }
}

#[test]
fn noetherian_integrals_are_constant_along_solutions() {
    let cases = [
        (PowerLagrangian::new(2.0, -5.0).unwrap(), GeneratorSpec::g2(), 1.0, 0.2),
        (
            PowerLagrangian::new(2.0, -7.0).unwrap(),
            GeneratorSpec::half_scaling(),
            1.1,
            -0.1,
        ),
    ];
    for (lag, gen, t0, tp0) in cases {
        let integral = noether_integral(&lag, &gen).unwrap();
        assert!(integral.noetherian);
        let traj = ef_run(lag.n, lag.m, 1.0, t0, tp0, 3.0);
        let values = along(&traj, |j, t, tp| integral.eval(j, t, tp));
        assert!(drift_metric(&values).unwrap() <= 1e-8);
    }
}

#[test]
fn non_noetherian_generator_is_not_conserved() {
    let lag = PowerLagrangian::new(2.0, -5.0).unwrap();
    let res = noether_residual(&lag, &GeneratorSpec::g1(), &default_grid()).unwrap();
    assert!(res.iter().any(|r| r.abs() > 1e-3));
    let integral = noether_integral(&lag, &GeneratorSpec::g1()).unwrap();
    assert!(!integral.noetherian);
    let traj = ef_run(2.0, -5.0, 1.0, 1.0, 0.2, 3.0);
    let values = along(&traj, |j, t, tp| integral.eval(j, t, tp));
    assert!(drift_metric(&values).unwrap() > 1e-3);
}
