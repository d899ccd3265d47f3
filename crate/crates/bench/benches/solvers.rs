use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dlog_bench::fixture_instances;
use dlog_core::solvers::{solve, SolveOptions};
use dlog_core::Algorithm;

fn solvers(c: &mut Criterion) {
    let options = SolveOptions::default();
    for bits in [24, 32] {
        let instances = fixture_instances(bits, 8, 11);
        let mut group = c.benchmark_group(format!("{bits}-bit"));
        group.sample_size(10);
        for alg in [
            Algorithm::DoubleIndexCalculus,
            Algorithm::IndexCalculus,
            Algorithm::PollardRho,
            Algorithm::BabyStepGiantStep,
        ] {
            group.bench_with_input(BenchmarkId::from_parameter(alg), &instances, |b, insts| {
                b.iter(|| {
                    for (i, inst) in insts.iter().enumerate() {
                        let r = solve(inst, alg, &options, i as u64).expect("fixture instance solves");
                        std::hint::black_box(r.x);
                    }
                })
            });
        }
        group.finish();
    }
}

criterion_group!(benches, solvers);
criterion_main!(benches);
