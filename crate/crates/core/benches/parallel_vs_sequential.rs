use criterion::{criterion_group, criterion_main, Criterion};
use ddtk_core::{catalog, trades};

fn bench_trade_graph(c: &mut Criterion) {
    let d = catalog::load("dd-28")
        .expect("catalog entry")
        .design
        .directed()
        .expect("directed design")
        .clone();

    let mut group = c.benchmark_group("build_trade_graph/dd-28");
    group.bench_function("parallel", |b| b.iter(|| trades::build_trade_graph(&d)));
    group.bench_function("sequential", |b| b.iter(|| trades::build_trade_graph_seq(&d)));
    group.finish();
}

criterion_group!(benches, bench_trade_graph);
criterion_main!(benches);
