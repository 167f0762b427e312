use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use procmine::{token_replay, Classifier, Miner, MinerParams, ReplayParams};
use procmine_bench::synthetic_log;

fn replay(c: &mut Criterion) {
    let classifier = Classifier::default();
    let log = synthetic_log(2000, 7);
    let model = Miner::Inductive.discover(&log, &classifier, &MinerParams::default()).unwrap();
    let mut group = c.benchmark_group("token-replay");
    group.throughput(Throughput::Elements(log.num_traces() as u64));
    for (name, parallel) in [("sequential", false), ("parallel", true)] {
        let params = ReplayParams { parallel, ..ReplayParams::default() };
        group.bench_function(name, |b| {
            b.iter(|| token_replay(&log, &classifier, &model, &params).unwrap());
        });
    }
    group.finish();
}

criterion_group!(benches, replay);
criterion_main!(benches);
