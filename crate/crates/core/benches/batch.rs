use criterion::{black_box, criterion_group, criterion_main, Criterion};
use gndk_core::batch::{bars_all, bars_all_seq, check_all, check_all_seq, normalize_all, normalize_all_seq};
use gndk_core::calculus::reference_calculus;
use gndk_core::derivation::Derivation;
use gndk_core::gen::{random_grounding_derivation, DetourGen};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn detour_corpus(n: u64) -> Vec<Derivation> {
    let spec = reference_calculus();
    (0..n)
        .map(|seed| {
            let mut rng = StdRng::seed_from_u64(seed);
            DetourGen::new(&mut rng, &spec).derivation(1 + (seed % 8) as usize)
        })
        .collect()
}

fn grounding_corpus(n: u64) -> Vec<Derivation> {
    let spec = reference_calculus();
    let mut rng = StdRng::seed_from_u64(n);
    (0..n).map(|i| random_grounding_derivation(&mut rng, &spec, 1 + (i % 10) as usize)).collect()
}

fn bench(c: &mut Criterion) {
    let spec = reference_calculus();
    let detours = detour_corpus(512);
    let trees = grounding_corpus(512);

    let mut g = c.benchmark_group("normalize");
    g.bench_function("parallel", |b| b.iter(|| normalize_all(black_box(&detours), false, 10_000)));
    g.bench_function("sequential", |b| b.iter(|| normalize_all_seq(black_box(&detours), false, 10_000)));
    g.finish();

    let mut g = c.benchmark_group("check");
    g.bench_function("parallel", |b| b.iter(|| check_all(black_box(&detours), &spec)));
    g.bench_function("sequential", |b| b.iter(|| check_all_seq(black_box(&detours), &spec)));
    g.finish();

    let mut g = c.benchmark_group("bars");
    g.bench_function("parallel", |b| b.iter(|| bars_all(black_box(&trees))));
    g.bench_function("sequential", |b| b.iter(|| bars_all_seq(black_box(&trees))));
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
