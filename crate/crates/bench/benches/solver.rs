use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use pampa::spatial_ho::EpsPolicy;
use pampa::{check_basis, Mode, SolverOptions};
use pampa_bench::{euler, scalar};

fn opts(mode: Mode) -> SolverOptions {
    SolverOptions { mode, ..Default::default() }
}

fn basis(c: &mut Criterion) {
    let x = [[0.0, 0.0], [1.3, 0.2], [0.4, 0.9]];
    c.bench_function("check_basis", |b| b.iter(|| check_basis(black_box(&x)).unwrap()));
}

fn stages(c: &mut Criterion) {
    let mut g = c.benchmark_group("forward_euler_stage");
    g.sample_size(20);
    for mode in [Mode::Ho, Mode::Bp, Mode::BpOe] {
        let (s, u) = scalar("example2", 0.05, opts(mode));
        let dt = 0.5 * s.compute_dt(&u).unwrap();
        // Warm the lazily built tables outside the timing.
        s.forward_euler_step(&u, 0.0, dt).unwrap();
        g.bench_function(format!("zalesak/{mode:?}/{}", s.mesh.n_triangles()), |b| {
            b.iter(|| s.forward_euler_step(black_box(&u), 0.0, dt).unwrap())
        });
    }
    let (s, u) = euler("example4", 0.05, opts(Mode::BpOe));
    let dt = 0.5 * s.compute_dt(&u).unwrap();
    s.forward_euler_step(&u, 0.0, dt).unwrap();
    g.bench_function(format!("riemann/BpOe/{}", s.mesh.n_triangles()), |b| {
        b.iter(|| s.forward_euler_step(black_box(&u), 0.0, dt).unwrap())
    });
    g.finish();
}

fn weights(c: &mut Criterion) {
    let (s, u) = euler("example4", 0.05, opts(Mode::BpOe));
    c.bench_function("upwind_weights/riemann", |b| b.iter(|| s.weights(black_box(&u), EpsPolicy::HalfArea)));
}

fn rk_step(c: &mut Criterion) {
    let (s, u) = scalar("example3", 0.1, opts(Mode::BpOe));
    let dt = 0.5 * s.compute_dt(&u).unwrap();
    s.ssprk3_step(&u, 0.0, dt).unwrap();
    let mut g = c.benchmark_group("ssprk3");
    g.sample_size(10);
    g.bench_function(format!("kpp/{}", s.mesh.n_triangles()), |b| {
        b.iter_batched(|| u.clone(), |u| s.ssprk3_step(&u, 0.0, dt).unwrap(), BatchSize::LargeInput)
    });
    g.finish();
}

criterion_group!(benches, basis, stages, weights, rk_step);
criterion_main!(benches);
