use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use specweight::scattering::{linspace, snap_to_knot};
use specweight::{
    build_bsec_free, build_bsec_numeric, scan_phase, shift_report, truncate_and_width, NewWeight,
    PotentialModel, RadialGrid,
};

fn shift(c: &mut Criterion) {
    let model = PotentialModel::InfiniteWell { width: PI };
    let grid = RadialGrid::new(PI, 3001).unwrap();
    c.bench_function("shift_report well n=3001", |b| {
        b.iter(|| shift_report(&model, 1, NewWeight::Ratio(2.0), black_box(&grid), 4).unwrap())
    });
}

fn bsec(c: &mut Criterion) {
    let grid = RadialGrid::new(100.0, 10001).unwrap();
    c.bench_function("bsec free closed form", |b| {
        b.iter(|| build_bsec_free(1.0, black_box(1.0), &grid).unwrap())
    });
    let coulomb = PotentialModel::RepulsiveCoulomb { strength: 1.0 };
    c.bench_function("bsec coulomb numeric", |b| {
        b.iter(|| build_bsec_numeric(&coulomb, 1.0, black_box(1.0), &grid).unwrap())
    });
}

fn scattering(c: &mut Criterion) {
    let grid = RadialGrid::new(300.0, 30001).unwrap();
    let sys = build_bsec_free(1.0, 1.0, &grid).unwrap();
    let energies = linspace(0.8, 1.2, 21);
    c.bench_function("scan_phase 21 energies", |b| {
        b.iter(|| scan_phase(&sys.v, black_box(&energies), (200.0, 200.0 + 20.0 * PI)).unwrap())
    });
    let r_cut = snap_to_knot(&sys, sys.knots()[19]).unwrap();
    c.bench_function("truncate_and_width knot 20", |b| {
        b.iter(|| truncate_and_width(&sys, black_box(r_cut), (0.8, 1.2), 81).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = shift, bsec, scattering
}
criterion_main!(benches);
