use std::hint::black_box;

use casimir_de::de::de_energy;
use casimir_de::geometry::{make_cylinder_profile, make_sphere_profile};
use casimir_de::kernels::InteractionKernel;
use casimir_de::numerics::{integrate_semi_infinite, QuadOptions};
use casimir_de::perturbative::dirichlet_f2;
use casimir_de::proximity::pfa_energy;
use casimir_de::thermal::{b0, b2};
use criterion::{criterion_group, criterion_main, Criterion};

fn quadrature(c: &mut Criterion) {
    let opts = QuadOptions::rel(1e-10);
    let breaks: Vec<f64> = (1..30).map(|k| 2f64.powi(k)).collect();
    c.bench_function("semi_infinite_power_law", |b| {
        b.iter(|| integrate_semi_infinite(|h| h.powi(-3), black_box(1.0), &breaks, &opts).unwrap())
    });

    let dirichlet = InteractionKernel::dirichlet(3).unwrap();
    let sphere = make_sphere_profile(1e-2, 1.0, 0.95).unwrap();
    c.bench_function("sphere_pfa", |b| b.iter(|| pfa_energy(black_box(&sphere), &dirichlet).unwrap()));

    let electrostatic = InteractionKernel::electrostatic(1.0).unwrap();
    let cylinder = make_cylinder_profile(1e-3, 1.0, 0.95).unwrap();
    c.bench_function("cylinder_de", |b| {
        b.iter(|| de_energy(black_box(&cylinder), &electrostatic, 1.0 / 3.0).unwrap())
    });
}

fn form_factor(c: &mut Criterion) {
    c.bench_function("dirichlet_f2", |b| b.iter(|| dirichlet_f2(black_box(0.05), 1.0).unwrap()));
}

fn thermal(c: &mut Criterion) {
    let mut g = c.benchmark_group("thermal");
    g.sample_size(20);
    for xi in [0.1, 1.0] {
        g.bench_function(format!("b0_xi{xi}"), |b| b.iter(|| b0(black_box(xi), 3).unwrap()));
        g.bench_function(format!("b2_xi{xi}"), |b| b.iter(|| b2(black_box(xi), 3).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, quadrature, form_factor, thermal);
criterion_main!(benches);
