use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use jslibtrace::analysis::SiteReport;
use jslibtrace::parallel::{fold_reports, fold_reports_sequential, process_sites, process_sites_sequential, SiteInput};

#[path = "../tests/common/mod.rs"]
mod common;

fn corpus(sites: usize) -> Vec<SiteInput> {
    common::sample(common::site_spec(0), sites)
        .into_iter()
        .enumerate()
        .map(|(i, mut spec)| {
            spec.domain = format!("site{i}.test");
            SiteInput { source: spec.domain.clone(), site_domain: None, events: common::site_events(&spec) }
        })
        .collect()
}

fn sites(c: &mut Criterion) {
    let cat = common::random_catalogue();
    let mut group = c.benchmark_group("process_sites");
    for n in [64, 512] {
        let inputs = corpus(n);
        group.bench_with_input(BenchmarkId::new("sequential", n), &inputs, |b, i| {
            b.iter(|| process_sites_sequential(black_box(i), &cat, &[]))
        });
        group.bench_with_input(BenchmarkId::new("rayon", n), &inputs, |b, i| {
            b.iter(|| process_sites(black_box(i), &cat, &[]))
        });
    }
    group.finish();
}

fn fold(c: &mut Criterion) {
    let cat = common::random_catalogue();
    let reports: Vec<SiteReport> = process_sites_sequential(&corpus(2048), &cat, &[])
        .into_iter()
        .map(|r| r.unwrap().report)
        .collect();
    let mut group = c.benchmark_group("fold_reports");
    group.bench_function("sequential", |b| b.iter(|| fold_reports_sequential(black_box(&reports))));
    group.bench_function("rayon", |b| b.iter(|| fold_reports(black_box(&reports))));
    group.finish();
}

criterion_group!(benches, sites, fold);
criterion_main!(benches);
