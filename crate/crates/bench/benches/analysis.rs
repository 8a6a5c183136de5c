use criterion::{black_box, criterion_group, criterion_main, Criterion};
use curlforce_core::analysis::{ef_residual, orbit_theta_of_r, power_solution_y0, time_of_r, torque_map};
use curlforce_core::invariants::{default_grid, noether_residual, GeneratorSpec, PowerLagrangian};
use curlforce_core::systems::polar_rhs;
use curlforce_core::{integrate, ForceField, IntegratorSettings};

fn curl(c: &mut Criterion) {
    let field = curlforce_bench::ermakov();
    c.bench_function("curl analytic", |b| {
        b.iter(|| field.curl(black_box(1.3), black_box(0.7)).unwrap())
    });
    c.bench_function("curl finite difference", |b| {
        b.iter(|| field.curl_fd(black_box(1.3), black_box(0.7), 1e-5).unwrap())
    });
}

fn quadrature(c: &mut Criterion) {
    let grid: Vec<f64> = (0..41).map(|k| 1.0 + 0.05 * k as f64).collect();
    c.bench_function("orbit theta(r), 41 points", |b| {
        b.iter(|| orbit_theta_of_r(0.0, 0.0, black_box(&grid)).unwrap())
    });
    c.bench_function("orbit t(r), 41 points", |b| {
        b.iter(|| time_of_r(0.0, 0.0, black_box(&grid)).unwrap())
    });
}

fn mapping(c: &mut Criterion) {
    let rhs = polar_rhs(&ForceField::Isotropic { mu: -1.5 }).unwrap();
    let traj = integrate(&rhs, &[1.0, 0.0, 0.2, 1.0], &IntegratorSettings::fixed(0.0, 10.0, 1e-3)).unwrap();
    c.bench_function("torque map + residual", |b| {
        b.iter(|| {
            let series = torque_map(black_box(&traj), -1.5, 0.0, true).unwrap();
            ef_residual(&series, 2.0, -5.0).unwrap()
        })
    });
    let lag = PowerLagrangian::new(2.0, -5.0).unwrap();
    let grid = default_grid();
    c.bench_function("noether residual G2", |b| {
        b.iter(|| noether_residual(&lag, &GeneratorSpec::g2(), black_box(&grid)).unwrap())
    });
    c.bench_function("power solution root", |b| {
        b.iter(|| power_solution_y0(black_box(1.0)).unwrap())
    });
}

criterion_group!(benches, curl, quadrature, mapping);
criterion_main!(benches);
