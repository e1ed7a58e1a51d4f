use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use incmerkle::harness::{self, HarnessConfig};
use incmerkle::oracle::build_merkle_with;
use incmerkle::{DepositContract, DepositVariant, Digest, Execution, Sha256Combiner};

fn leaves(n: usize) -> Vec<Digest> {
    (0..n as u64)
        .map(|i| {
            let mut d = [0u8; 32];
            d[..8].copy_from_slice(&i.to_le_bytes());
            Digest(d)
        })
        .collect()
}

fn deposit_vs_rebuild(c: &mut Criterion) {
    let mut group = c.benchmark_group("append_then_root");
    for h in [8u32, 12, 16] {
        let values = leaves((1usize << h) - 1);
        let mut warm = DepositContract::new(h, Sha256Combiner, false).unwrap();
        for v in &values[..values.len() - 1] {
            warm.deposit(*v, DepositVariant::Optimized).unwrap();
        }
        let last = *values.last().unwrap();
        group.bench_with_input(BenchmarkId::new("incremental", h), &h, |b, _| {
            b.iter(|| {
                let mut c = warm.clone();
                c.deposit(last, DepositVariant::Optimized).unwrap();
                black_box(c.get_deposit_root())
            })
        });
        for (label, exec) in [
            ("oracle_sequential", Execution::Sequential),
            ("oracle_parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(label, h), &h, |b, &h| {
                b.iter(|| black_box(build_merkle_with(exec, &values, h, &Sha256Combiner).unwrap()))
            });
        }
    }
    group.finish();
}

fn harness_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_root_agreement_sweep");
    group.sample_size(10);
    for (label, execution) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        let config = HarnessConfig {
            max_height: 5,
            value_draws: 20,
            execution,
            ..HarnessConfig::default()
        };
        group.bench_function(label, |b| {
            b.iter(|| black_box(harness::run_property("oracle_root_agreement", &config).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, deposit_vs_rebuild, harness_sweep);
criterion_main!(benches);
