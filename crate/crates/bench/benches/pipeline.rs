use std::hint::black_box;

use aoqmap_bench::{complete, dc_qaoa, dc_qaoa_lowered};
use aoqmap_core::circuit::decompose_circuit;
use aoqmap_core::device::{select, DeviceModel};
use aoqmap_core::mitigate::{zne_expectation, Extrapolation, SCALES_3};
use aoqmap_core::optimize::brute_force;
use aoqmap_core::router::{route_complete, BlockTerms, MirrorMode};
use aoqmap_core::sim::{simulate, NoiseModel, SimOptions};
use aoqmap_core::GateKind;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn routing(c: &mut Criterion) {
    let mut g = c.benchmark_group("route_complete");
    for n in [8, 16, 32, 64] {
        let terms = BlockTerms::uniform(GateKind::Zz, n, 0.3).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| route_complete(black_box(&terms), n, MirrorMode::Fs, false).unwrap())
        });
    }
    g.finish();
}

fn lowering(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_and_lower");
    for n in [5, 10, 20] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| decompose_circuit(&dc_qaoa(black_box(n), 3)).unwrap())
        });
    }
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate");
    g.sample_size(20);
    for n in [6, 10, 14] {
        let circuit = dc_qaoa_lowered(n, 1);
        g.bench_with_input(BenchmarkId::new("statevector", n), &circuit, |b, circuit| {
            b.iter(|| simulate(circuit, None, &SimOptions::default()).unwrap())
        });
    }
    let noise = NoiseModel::depolarizing(0.0005, 0.005).unwrap();
    for n in [4, 6] {
        let circuit = dc_qaoa_lowered(n, 1);
        g.bench_with_input(BenchmarkId::new("density", n), &circuit, |b, circuit| {
            b.iter(|| simulate(circuit, Some(&noise), &SimOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn mitigation(c: &mut Criterion) {
    let circuit = dc_qaoa_lowered(5, 1);
    let h = complete(5).hamiltonian;
    let noise = NoiseModel::depolarizing(0.0005, 0.005).unwrap();
    c.bench_function("zne_5q_three_scales", |b| {
        b.iter(|| zne_expectation(&circuit, &noise, &h, &SCALES_3, Extrapolation::Linear, &SimOptions::default()).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let p = complete(16);
    c.bench_function("brute_force_16", |b| b.iter(|| brute_force(black_box(&p)).unwrap()));
}

fn placement(c: &mut Criterion) {
    let device = DeviceModel::bundled("ehningen").unwrap();
    let mut g = c.benchmark_group("select_chain_27q");
    for n in [3, 5, 8] {
        let circuit = dc_qaoa_lowered(n, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &circuit, |b, circuit| {
            b.iter(|| select(&device, circuit).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, routing, lowering, simulation, mitigation, oracle, placement);
criterion_main!(benches);
