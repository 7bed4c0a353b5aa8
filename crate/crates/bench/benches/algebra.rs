use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weil_core::chainlab::verifier::{self, VerifierConfig};
use weil_core::exactalg::random::random_matrix;
use weil_core::exactalg::snf;
use weil_core::weilcoh::descent;
use weil_core::zetaval::{example_projective_space, verify_zeta_formula};

fn smith(c: &mut Criterion) {
    let mut group = c.benchmark_group("snf");
    for n in [4usize, 8, 12] {
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let mats: Vec<_> = (0..16).map(|_| random_matrix(&mut rng, n, n, 50)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &mats, |b, mats| {
            b.iter(|| mats.iter().map(|m| snf(black_box(m)).diag.rows()).sum::<usize>())
        });
    }
    group.finish();
}

fn weil(c: &mut Criterion) {
    let ex = example_projective_space(&BigInt::from(7), 4, 2).unwrap();
    c.bench_function("descent P^4", |b| b.iter(|| descent(black_box(&ex.data)).unwrap()));
    c.bench_function("zeta check P^4", |b| {
        b.iter(|| verify_zeta_formula(&ex.zeta, black_box(&ex.data), &ex.hodge).unwrap())
    });
}

fn lab(c: &mut Criterion) {
    let config = VerifierConfig {
        cases: 8,
        ..VerifierConfig::default()
    };
    let mut group = c.benchmark_group("verifier");
    group.sample_size(10);
    group.bench_function("8 cases", |b| b.iter(|| verifier::run(black_box(&config))));
    group.finish();
}

criterion_group!(benches, smith, weil, lab);
criterion_main!(benches);
