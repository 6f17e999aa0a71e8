//! Parallel vs sequential throughput on the two bulk workloads: m-function
//! grid evaluation and the certificate sweep.  Both paths call the same
//! public API through the ordered-map entry points, so the numbers isolate
//! scheduling overhead and speedup, not algorithmic differences.

use criterion::{criterion_group, criterion_main, Criterion};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::{FRAC_PI_2, PI};

use spectral_cs::canonical::TraceNormedHamiltonian;
use spectral_cs::operator::JacobiCoefficients;
use spectral_cs::par::{map_ordered, map_ordered_seq};
use spectral_cs::weak_star::{
    certificate_example_phase, ds_comparison_phase, standard_test_pair, weak_star_discrepancy,
};
use spectral_cs::weyl::{default_grid, m_jacobi};

fn moderate_coefficients(rng: &mut StdRng, n: usize) -> JacobiCoefficients {
    let mut a = vec![-1.0];
    for _ in 0..n {
        a.push(rng.gen_range(-1.25..-0.8));
    }
    let b = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    JacobiCoefficients::new(a, b, 3.0).expect("sampled coefficients are valid")
}

fn bench_mfunc_grid(c: &mut Criterion) {
    let mut rng = StdRng::seed_from_u64(7);
    let coeffs = moderate_coefficients(&mut rng, 60);
    let grid = default_grid();
    let eval = |&z: &num_complex::Complex64| m_jacobi(&coeffs, z, 2000).unwrap();
    let mut group = c.benchmark_group("mfunc_grid");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| map_ordered(&grid, eval)));
    group.bench_function("sequential", |b| b.iter(|| map_ordered_seq(&grid, eval)));
    group.finish();
}

fn bench_certificate_sweep(c: &mut Criterion) {
    let target = TraceNormedHamiltonian::new(certificate_example_phase());
    let tests = standard_test_pair();
    let resolution = 20_000usize;
    let lo = FRAC_PI_2 + 1e-6;
    let step = (PI - 2e-6) / (resolution - 1) as f64;
    let psis: Vec<f64> = (0..resolution).map(|i| lo + step * i as f64).collect();
    let eval = |&psi: &f64| {
        let ds = TraceNormedHamiltonian::new(ds_comparison_phase(psi).unwrap());
        weak_star_discrepancy(&target, &ds, &tests).unwrap()
    };
    let mut group = c.benchmark_group("certificate_sweep");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| map_ordered(&psis, eval)));
    group.bench_function("sequential", |b| b.iter(|| map_ordered_seq(&psis, eval)));
    group.finish();
}

criterion_group!(benches, bench_mfunc_grid, bench_certificate_sweep);
criterion_main!(benches);
