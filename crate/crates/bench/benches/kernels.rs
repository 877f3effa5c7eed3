use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use std::hint::black_box;
use wlim_bench::{outer_family, weight, M_CUT};
use wlim_core::operators::{row_values, QuadPlan};
use wlim_core::outer::{herglotz_segment, RelAngle};

fn bench_segment(c: &mut Criterion) {
    let z = Complex64::from_polar(0.8, 1.1);
    c.bench_function("herglotz_segment", |b| {
        b.iter(|| herglotz_segment(black_box(z), 0.4, 2.3).unwrap())
    });
}

fn bench_exponents(c: &mut Criterion) {
    let of = outer_family();
    let z = Complex64::from_polar(0.8, 1.1);
    let ns: Vec<usize> = (1..=8).collect();
    c.bench_function("exponents_all_n8", |b| {
        b.iter(|| of.exponents_all(black_box(z), M_CUT, &ns).unwrap())
    });
}

fn bench_phases(c: &mut Criterion) {
    let of = outer_family();
    let angle = RelAngle { base: of.j_lo(2), offset: of.eps(2) * 0.25 };
    c.bench_function("phases_pv_n8", |b| {
        b.iter(|| of.phases_pv(black_box(angle), 8, M_CUT).unwrap())
    });
    c.bench_function("phases_radial_n8", |b| {
        b.iter(|| of.phases_radial(black_box(angle), 8, M_CUT).unwrap())
    });
}

fn bench_weight_eval(c: &mut Criterion) {
    let w = weight();
    c.bench_function("angular_weight_eval", |b| {
        b.iter(|| w.value_at_angle(black_box(0.3813)))
    });
}

fn bench_matrix_row(c: &mut Criterion) {
    let of = outer_family();
    let plan = QuadPlan::new(4).unwrap();
    c.bench_function("operator_row_n2_levels4", |b| {
        b.iter(|| row_values(&of, 2, 4, black_box(plan), M_CUT).unwrap())
    });
}

criterion_group!(
    benches,
    bench_segment,
    bench_exponents,
    bench_phases,
    bench_weight_eval,
    bench_matrix_row
);
criterion_main!(benches);
