use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use qpolar::{
    build_symmetric_qpc, exact_mld, polar_transform, sample_bsc, scl_decide_both, BitBlock,
    ConstructionSpec, QuantumPolarCode, SclDecoder,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pw(n: usize, k: usize) -> QuantumPolarCode {
    build_symmetric_qpc(n, k, &ConstructionSpec::pw()).unwrap()
}

fn transform(c: &mut Criterion) {
    let mut g = c.benchmark_group("transform");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [6, 10, 14] {
        let u: BitBlock = sample_bsc(1 << n, 0.5, &mut rng);
        g.bench_with_input(BenchmarkId::from_parameter(1 << n), &u, |b, u| {
            b.iter(|| polar_transform(black_box(u)))
        });
    }
    g.finish();
}

fn syndrome_scl(c: &mut Criterion) {
    let mut g = c.benchmark_group("scl_syndrome");
    g.sample_size(20);
    for (n, l, p) in [(6, 4, 0.1), (9, 16, 0.08), (9, 64, 0.1), (11, 32, 0.08)] {
        let code = pw(n, 2);
        let mut decoder = SclDecoder::with_list_size(l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let id = BenchmarkId::from_parameter(format!("N{}_L{l}", 1 << n));
        g.bench_function(id, |b| {
            b.iter_batched(
                || code.x_syndrome(&sample_bsc(code.len(), p, &mut rng)).unwrap(),
                |s| decoder.decode_syndrome(code.x_noise_code(), &s, p).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    g.finish();
}

fn decisions(c: &mut Criterion) {
    let mut g = c.benchmark_group("decision");
    let code = pw(9, 2);
    let mut decoder = SclDecoder::with_list_size(64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = code.x_syndrome(&sample_bsc(code.len(), 0.1, &mut rng)).unwrap();
    let list = decoder.decode_syndrome(code.x_noise_code(), &s, 0.1).unwrap();
    g.bench_function("scl_e_and_c_N512_L64", |b| {
        b.iter(|| scl_decide_both(&code, black_box(&list), 0.1, 7).unwrap())
    });
    let small = pw(4, 2);
    let s = small.x_syndrome(&sample_bsc(16, 0.1, &mut rng)).unwrap();
    g.bench_function("exact_mld_N16", |b| b.iter(|| exact_mld(&small, black_box(&s), 0.1, 7).unwrap()));
    let mid = pw(5, 2);
    let s = mid.x_syndrome(&sample_bsc(32, 0.1, &mut rng)).unwrap();
    g.bench_function("exact_mld_N32", |b| b.iter(|| exact_mld(&mid, black_box(&s), 0.1, 7).unwrap()));
    g.finish();
}

criterion_group!(benches, transform, syndrome_scl, decisions);
criterion_main!(benches);
