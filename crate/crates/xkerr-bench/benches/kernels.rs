use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use xkerr::analytic::{franck_condon, g2_perturbative, DEFAULT_L_MAX};
use xkerr::catgen::{cat_state, wigner_pure, CatSpec, GridSpec};
use xkerr::gaussian::{diffusion_matrix, drift_matrix, entanglement_point, lyapunov_solve, mean_field};
use xkerr::lindblad::photon_statistics;
use xkerr::{DriveAndBath, EffectiveCouplings, SpaceSpec, C64};
use xkerr_bench::{blockade_point, cat_point};

fn steady_state(c: &mut Criterion) {
    let (eff, bath) = blockade_point();
    let mut group = c.benchmark_group("steady_state");
    group.sample_size(10);
    for (na, nm) in [(4, 12), (5, 20)] {
        let space = SpaceSpec::new(na, nm).unwrap();
        group.bench_function(format!("{na}x{nm}"), |b| b.iter(|| photon_statistics(black_box(&eff), &bath, space).unwrap()));
    }
    group.finish();
    c.bench_function("g2_perturbative", |b| b.iter(|| g2_perturbative(black_box(&eff), &bath, DEFAULT_L_MAX)));
}

fn wigner(c: &mut Criterion) {
    let eff = cat_point();
    let spec = CatSpec::new(2, 1, C64::new(4.0, 0.0), &eff).unwrap();
    let psi = cat_state(&spec, &eff, 60).unwrap();
    let grid = GridSpec { min: -10.0, max: 10.0, points: 201 };
    c.bench_function("wigner_201x201_nm60", |b| b.iter(|| wigner_pure(black_box(&psi), grid).unwrap()));
}

fn strong_drive() -> (EffectiveCouplings, DriveAndBath) {
    let wm = 2.0 * std::f64::consts::PI * 50e6;
    let eff = EffectiveCouplings::new(2.0 * std::f64::consts::PI * 10e9, wm, -3.29e6, -9.25e4, -1.01e4);
    let bath = DriveAndBath::new(16.0 * wm, 5.5e10, 1e6, 5e5, 0.5);
    (eff, bath)
}

fn lyapunov(c: &mut Criterion) {
    let (eff, bath) = strong_drive();
    let mf = mean_field(&eff, &bath).unwrap();
    let a = drift_matrix(&mf, &bath);
    let d = diffusion_matrix(&bath, 0.5);
    c.bench_function("lyapunov_solve", |b| b.iter(|| lyapunov_solve(black_box(&a), &d)));
    c.bench_function("entanglement_point", |b| b.iter(|| entanglement_point(black_box(&eff), &bath)));
}

fn franck_condon_table(c: &mut Criterion) {
    c.bench_function("franck_condon_30x30", |b| {
        b.iter(|| {
            let mut s = 0.0;
            for m in 0..30 {
                for mp in 0..30 {
                    s += franck_condon(m, mp, black_box(0.43));
                }
            }
            s
        })
    });
}

criterion_group!(kernels, steady_state, wigner, lyapunov, franck_condon_table);
criterion_main!(kernels);
