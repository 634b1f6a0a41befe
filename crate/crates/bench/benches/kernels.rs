//! Microbenchmarks for the numeric kernels: twisted Z-Fourier evaluation,
//! Zeeman block assembly and eigensolve, harmonic projection, dual Radon.

use criterion::{criterion_group, criterion_main, Criterion};
use nalgebra::DVector;
use std::sync::Arc;

use nilspec::algebra::h_type_space;
use nilspec::funcspace::{make_one_pole, GeneratorProfile, PoleBasis};
use nilspec::operators::{box_block, harmonic_projection, HermiteBasisSpec};
use nilspec::poly::{PolyExpr, PolyRat};
use nilspec::quad::QuadSpec;
use nilspec::radon::{dual_radon, PolarFunction, RadonSpec};

fn bench_eval_twisted(c: &mut Criterion) {
    let space = Arc::new(h_type_space(3, 1, 1).unwrap());
    let basis = PoleBasis::constant_default(&space).unwrap();
    let pole = match &*basis {
        PoleBasis::Constant(cb) => cb.vectors[0].clone(),
        _ => unreachable!(),
    };
    let f = make_one_pole(
        Arc::clone(&space),
        basis,
        &pole,
        2,
        1,
        GeneratorProfile::standard_gaussian(),
    )
    .unwrap();
    let quad = QuadSpec::preset("l3-default").unwrap();
    let x = DVector::from_vec(vec![0.4, -0.2, 0.1, 0.7, 0.3, 0.2, -0.5, 0.1]);
    let z = DVector::from_vec(vec![0.2, 0.5, -0.3]);
    c.bench_function("eval_twisted l3 one-pole", |b| {
        b.iter(|| f.eval(&x, &z, &quad).unwrap())
    });
}

fn bench_box_block(c: &mut Criterion) {
    let space = h_type_space(3, 1, 1).unwrap();
    let gamma = DVector::from_vec(vec![1.0, 0.5, -0.25]);
    let spec = HermiteBasisSpec::for_gamma(space.k, &gamma, 4).unwrap();
    c.bench_function("box_block assembly level 4 (k=8)", |b| {
        b.iter(|| box_block(&space, &gamma, &spec, 4).unwrap())
    });
    let block = box_block(&space, &gamma, &spec, 4).unwrap();
    c.bench_function("zheev level-4 block (330)", |b| {
        b.iter(|| nilspec::linalg::eigvalsh(&block).unwrap())
    });
}

fn bench_harmonic_projection(c: &mut Criterion) {
    let p: PolyRat = {
        let a = PolyExpr::var(8, 0).pow(4);
        let b = &PolyExpr::var(8, 1).pow(3) * &PolyExpr::var(8, 7);
        &a + &b
    };
    c.bench_function("harmonic_projection n=4 k=8", |b| {
        b.iter(|| harmonic_projection(&p).unwrap())
    });
}

fn bench_dual_radon(c: &mut Criterion) {
    let g = |theta: &DVector<f64>, r: f64| (-r * r).exp() * (theta[2] + 0.3 * theta[0]);
    let f = PolarFunction {
        l: 3,
        f: &g,
        support_radius: f64::INFINITY,
    };
    let spec = RadonSpec::default_l3();
    let z = DVector::from_vec(vec![0.8, -0.5, 0.6]);
    c.bench_function("dual_radon l3", |b| {
        b.iter(|| dual_radon(&f, &z, &spec).unwrap())
    });
}

criterion_group!(
    benches,
    bench_eval_twisted,
    bench_box_block,
    bench_harmonic_projection,
    bench_dual_radon
);
criterion_main!(benches);
