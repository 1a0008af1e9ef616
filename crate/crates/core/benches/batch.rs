//! Batch pipeline throughput: rayon worker pool against the sequential
//! fallback, across corpus sizes.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use z4z2::generators;
use z4z2::pipeline::{run_batch, ExecMode, PipelineConfig};
use z4z2::CubicGraph;

fn corpus(graphs: usize) -> Vec<(String, CubicGraph)> {
    // Snark-heavy mix so per-graph work dominates scheduling overhead.
    let mut out: Vec<(String, CubicGraph)> = Vec::new();
    let mut rng = generators::seeded_rng(99);
    let snarks = [
        generators::petersen(),
        generators::blanusa(1).unwrap(),
        generators::blanusa(2).unwrap(),
        generators::flower(5).unwrap(),
    ];
    let mut i = 0;
    while out.len() < graphs {
        if i % 2 == 0 {
            out.push((format!("snark{i}"), snarks[(i / 2) % snarks.len()].clone()));
        } else {
            out.push((
                format!("rand{i}"),
                generators::random_cubic_bridgeless(14, &mut rng).unwrap(),
            ));
        }
        i += 1;
    }
    out
}

fn bench_batch(c: &mut Criterion) {
    let config = PipelineConfig::default();
    let mut group = c.benchmark_group("pipeline_batch");
    for &size in &[8usize, 24, 48] {
        let graphs = corpus(size);
        group.bench_with_input(
            BenchmarkId::new("sequential", size),
            &graphs,
            |b, graphs| {
                b.iter(|| black_box(run_batch(graphs, &config, ExecMode::Sequential)));
            },
        );
        group.bench_with_input(BenchmarkId::new("parallel", size), &graphs, |b, graphs| {
            b.iter(|| black_box(run_batch(graphs, &config, ExecMode::Parallel)));
        });
    }
    group.finish();
}

fn bench_single_solvers(c: &mut Criterion) {
    let petersen = generators::petersen();
    let blanusa = generators::blanusa(1).unwrap();
    let cfg = z4z2::oracle::OracleConfig::default();
    c.bench_function("oracle_z4z2_petersen", |b| {
        b.iter(|| black_box(z4z2::oracle::brute_force_z4z2(&petersen, &cfg).unwrap()))
    });
    c.bench_function("characterization_blanusa1", |b| {
        b.iter(|| black_box(z4z2::oracle::characterization_search(&blanusa, 100_000_000)))
    });
}

criterion_group!(benches, bench_batch, bench_single_solvers);
criterion_main!(benches);
