use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DVector;

use umbilic_core::detect::{detect_rm_linear_relation, detect_with, DetectConfig};
use umbilic_core::frames::{frenet_apparatus_with, rm_apparatus_with, FrenetOptions};
use umbilic_core::spaceform::{classify_surface, SpaceForm};
use umbilic_core::synth::{synthesize_horosphere, synthesize_on_surface, torus_curve_s4, HorosphereParams, SurfaceCurveParams};
use umbilic_core::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn frenet_and_detect(c: &mut Criterion) {
    let mut p = HorosphereParams::figure(1.0);
    p.ds = 1e-4;
    let curve = synthesize_horosphere(&p).unwrap().curve;
    let mut group = c.benchmark_group("horosphere_20k");
    for (name, execution) in MODES {
        group.bench_with_input(BenchmarkId::new("frenet", name), &execution, |b, &execution| {
            let opts = FrenetOptions { execution, ..Default::default() };
            b.iter(|| frenet_apparatus_with(black_box(&curve), &opts).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("detect", name), &execution, |b, &execution| {
            let cfg = DetectConfig { execution, ..Default::default() };
            b.iter(|| detect_with(black_box(&curve), &cfg).unwrap())
        });
    }
    group.finish();
}

fn rm_relation(c: &mut Criterion) {
    let curve = torus_curve_s4(0.5, 0.6, 1.0, 2.3, 1e-4, 20_000).unwrap();
    let mut group = c.benchmark_group("torus_s4_20k");
    for (name, execution) in MODES {
        group.bench_with_input(BenchmarkId::new("rm_relation", name), &execution, |b, &execution| {
            b.iter(|| {
                let rm = rm_apparatus_with(black_box(&curve), None, execution).unwrap();
                detect_rm_linear_relation(&rm).unwrap()
            })
        });
    }
    group.finish();
}

fn surface_sweep(c: &mut Criterion) {
    let mut surfaces = Vec::new();
    for sigma in [-2.0, -1.5, 1.01, 1.5, 2.0] {
        surfaces.push((DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]), sigma, SpaceForm::Hyperbolic));
    }
    for sigma in [0.3, 0.5, 0.7] {
        surfaces.push((DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]), sigma, SpaceForm::Spherical));
    }
    let mut group = c.benchmark_group("surface_sweep");
    group.sample_size(20);
    for (name, execution) in MODES {
        group.bench_with_input(BenchmarkId::new("synthesize_detect", name), &execution, |b, &execution| {
            b.iter(|| {
                execution.map_slice(&surfaces, |(a, sigma, form)| {
                    let surface = classify_surface(a, *sigma, *form).unwrap();
                    let curve = synthesize_on_surface(&SurfaceCurveParams::new(surface, 1.0)).unwrap().curve;
                    let cfg = DetectConfig { execution: Execution::Sequential, ..Default::default() };
                    detect_with(&curve, &cfg).unwrap().verdict
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, frenet_and_detect, rm_relation, surface_sweep);
criterion_main!(benches);
