use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use formlap_core::graph::builders::{figure_eight, random_connected};
use formlap_core::graph::secular_lowest;
use formlap_core::mesh::generators::{cone_over, flat_torus};
use formlap_core::mesh::quotient::{quotient_spectrum_with, QuotientOptions};
use formlap_core::strata::{gm_perversity, ih_betti_relative};

fn secular(c: &mut Criterion) {
    let mut group = c.benchmark_group("secular_lowest");
    for (name, g) in [("figure-eight", figure_eight(1.0, 2.0)), ("random-8-3", random_connected(8, 3, 1))] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &g, |b, g| b.iter(|| secular_lowest(g, 50, 1e-12).unwrap()));
    }
    group.finish();
}

fn quotient(c: &mut Criterion) {
    let mut group = c.benchmark_group("quotient_spectrum");
    group.sample_size(10);
    let opts = QuotientOptions::default();
    for (side, p) in [(16, 0), (48, 0), (10, 1)] {
        let k = flat_torus(side, side, 1.0, 1.0).unwrap();
        let cochains = k.cochains(false).unwrap();
        group.bench_function(BenchmarkId::new(format!("torus{side}"), p), |b| {
            b.iter(|| quotient_spectrum_with(&cochains, p, 20, &opts).unwrap())
        });
    }
    group.finish();
}

fn intersection_homology(c: &mut Criterion) {
    let mut group = c.benchmark_group("ih_betti");
    group.sample_size(10);
    let cone = cone_over(&flat_torus(3, 3, 1.0, 1.0).unwrap(), 0.5).unwrap();
    group.bench_function("cone-over-torus", |b| b.iter(|| ih_betti_relative(&cone, &gm_perversity(3)).unwrap()));
    group.finish();
}

criterion_group!(benches, secular, quotient, intersection_homology);
criterion_main!(benches);
