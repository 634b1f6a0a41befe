//! Boundary-condition verification on sphere-ball manifolds: the
//! Z-Neumann-satisfying corpus, kappa-paired Dirichlet and Z-Neumann
//! verdicts, and the boundary-Laplacian intertwining.

use nalgebra::DVector;
use std::sync::Arc;

use nilspec::algebra::{h_type_space, sigma_deform, sigma_from_partition, EndomorphismSpace};
use nilspec::funcspace::{make_one_pole, GeneratorProfile, PoleBasis};
use nilspec::intertwine::{
    boundary_laplacian_check, build_z_neumann_one_pole, dirichlet_check, z_neumann_check,
    CutoffTwisted, DomainShape, KappaOperator,
};
use nilspec::operators;
use nilspec::quad::QuadSpec;

fn sigma_pair() -> (Arc<EndomorphismSpace>, Arc<EndomorphismSpace>) {
    let s11 = h_type_space(3, 1, 1).unwrap();
    let sigma = sigma_from_partition(&s11).unwrap();
    let s20 = sigma_deform(&s11, &sigma).unwrap();
    (Arc::new(s11), Arc::new(s20))
}

#[test]
fn z_neumann_corpus_and_boundary_laplacian() {
    let (s11, s20) = sigma_pair();
    let basis = PoleBasis::constant_default(&s11).unwrap();
    let quad = QuadSpec::preset("l3-default").unwrap();
    let op = KappaOperator::new(
        Arc::clone(&s11),
        Arc::clone(&s20),
        Arc::clone(&basis),
        quad.clone(),
    )
    .unwrap();
    let (r_x, r_z) = (1.0, 0.9);
    let pole = match &*basis {
        PoleBasis::Constant(c) => c.vectors[0].clone(),
        _ => unreachable!(),
    };
    let f = build_z_neumann_one_pole(
        Arc::clone(&s11),
        Arc::clone(&basis),
        &pole,
        1,
        0,
        r_z,
        &[0.5, 0.8, 1.25],
        &quad,
        91,
    )
    .unwrap();

    // the constructed mixture satisfies Z-Neumann on the boundary sphere,
    // and so does its kappa image
    let domain = DomainShape::SphereBall { r_x, r_z };
    let samples = domain.boundary_samples(8, 3, 8, 17, 0.05);
    let mut scale: f64 = 1e-12;
    for (x, z) in &samples {
        scale = scale.max(f.eval(x, z, &quad).unwrap().norm());
    }
    let fe = |x: &DVector<f64>, z: &DVector<f64>| f.eval(x, z, &quad).unwrap();
    let rep = z_neumann_check(&fe, &samples, scale, 1e-4, 1e-3);
    assert!(rep.passed, "source Z-Neumann residual {}", rep.max_residual);
    let kf = op.apply(&f).unwrap();
    let kfe = |x: &DVector<f64>, z: &DVector<f64>| kf.eval(x, z, &quad).unwrap();
    let rep = z_neumann_check(&kfe, &samples, scale, 1e-4, 1e-3);
    assert!(rep.passed, "kappa Z-Neumann residual {}", rep.max_residual);

    // the boundary Laplacian intertwines on the corpus
    let rep = boundary_laplacian_check(&op, &f, r_x, r_z, 6, 29, 1e-4, 1e-3).unwrap();
    assert!(rep.passed, "boundary residual {}", rep.max_residual);
}

#[test]
fn boundary_laplacian_rejects_generic_input() {
    let (s11, s20) = sigma_pair();
    let basis = PoleBasis::constant_default(&s11).unwrap();
    let quad = QuadSpec::preset("l3-default").unwrap();
    let op = KappaOperator::new(
        Arc::clone(&s11),
        Arc::clone(&s20),
        Arc::clone(&basis),
        quad.clone(),
    )
    .unwrap();
    let pole = match &*basis {
        PoleBasis::Constant(c) => c.vectors[0].clone(),
        _ => unreachable!(),
    };
    // plain Gaussian profile: does not satisfy Z-Neumann on the sphere
    let f = make_one_pole(
        Arc::clone(&s11),
        Arc::clone(&basis),
        &pole,
        1,
        0,
        GeneratorProfile::standard_gaussian(),
    )
    .unwrap();
    assert!(boundary_laplacian_check(&op, &f, 1.0, 0.9, 4, 3, 1e-4, 1e-3).is_err());
}

#[test]
fn z_independent_functions_have_equal_ambient_and_boundary_m() {
    // missing term vanishes: M~ = M - d/d|Z| D_{Z_u} agrees with M on
    // Z-independent functions
    let (s11, _) = sigma_pair();
    let f = |x: &DVector<f64>, _z: &DVector<f64>| {
        num_complex::Complex64::new((x[0] * x[3]).sin(), x[1])
    };
    let x = DVector::from_vec(vec![0.5, -0.2, 0.3, 0.4, 0.1, 0.2, -0.3, 0.2]);
    let z = DVector::from_vec(vec![0.4, 0.1, -0.3]);
    let h = 1e-3;
    let m = operators::m_operator(&s11, &f, &x, &z, h).unwrap();
    // the radial angular correction
    let zu = z.normalize();
    let w = s11.j_of(&zu).unwrap() * &x;
    let dzu = |zz: &DVector<f64>| (f(&(&x + &w * h), zz) - f(&(&x - &w * h), zz)) / (2.0 * h);
    let corr = (dzu(&(&z + &zu * h)) - dzu(&(&z - &zu * h))) / (2.0 * h);
    assert!(corr.norm() < 1e-9 * m.norm().max(1.0));
}

#[test]
fn kappa_paired_verdicts_agree_on_cutoff_corpus() {
    // ten cutoff-built functions: Dirichlet (power 1) and Z-Neumann
    // (power 2) hold for f and kappa f simultaneously; the raw functions
    // fail both, also simultaneously
    let (s11, s20) = sigma_pair();
    let basis = PoleBasis::constant_default(&s11).unwrap();
    let quad = QuadSpec {
        n_radial: 20,
        n_polar: 14,
        n_azimuth: 28,
        tail_sigmas: 10.0,
    };
    let op = KappaOperator::new(
        Arc::clone(&s11),
        Arc::clone(&s20),
        Arc::clone(&basis),
        quad.clone(),
    )
    .unwrap();
    let domain = DomainShape::SphereBall { r_x: 1.0, r_z: 0.8 };
    let samples = domain.boundary_samples(8, 3, 6, 37, 0.05);
    let vectors = match &*basis {
        PoleBasis::Constant(c) => c.vectors.clone(),
        _ => unreachable!(),
    };
    let mut corpus = Vec::new();
    for i in 0..5 {
        let pole = &vectors[i % 4] * (1.0 - 0.1 * i as f64) + &vectors[(i + 2) % 4] * 0.3;
        for (p, q) in [(1u8, 0u8), (1, 1)] {
            corpus.push(
                make_one_pole(
                    Arc::clone(&s11),
                    Arc::clone(&basis),
                    &pole,
                    p,
                    q,
                    GeneratorProfile::standard_gaussian(),
                )
                .unwrap(),
            );
        }
    }
    assert_eq!(corpus.len(), 10);
    for (i, inner) in corpus.into_iter().enumerate() {
        let cut = CutoffTwisted {
            inner,
            domain: domain.clone(),
            power: 1,
            quad: quad.clone(),
        };
        let kcut = cut.apply_kappa(&op).unwrap();
        let interior = {
            // scale from an interior point
            let x = DVector::from_vec(vec![0.5, -0.2, 0.3, 0.4, 0.1, 0.2, -0.3, 0.2]);
            let z = DVector::from_vec(vec![0.2, 0.1, -0.1]);
            cut.eval(&x, &z).unwrap().norm().max(1e-6)
        };
        let ce = |x: &DVector<f64>, z: &DVector<f64>| cut.eval(x, z).unwrap();
        let kce = |x: &DVector<f64>, z: &DVector<f64>| kcut.eval(x, z).unwrap();
        let d1 = dirichlet_check(&ce, &domain, &samples, interior, 1e-10);
        let d2 = dirichlet_check(&kce, &domain, &samples, interior, 1e-10);
        assert_eq!(d1.passed, d2.passed, "corpus {i}");
        assert!(d1.passed, "corpus {i}");
        // negative control: the inner functions fail on both sides
        let re = |x: &DVector<f64>, z: &DVector<f64>| cut.inner.eval(x, z, &quad).unwrap();
        let kre = |x: &DVector<f64>, z: &DVector<f64>| kcut.inner.eval(x, z, &quad).unwrap();
        let d1 = dirichlet_check(&re, &domain, &samples, interior, 1e-10);
        let d2 = dirichlet_check(&kre, &domain, &samples, interior, 1e-10);
        assert_eq!(d1.passed, d2.passed, "corpus {i}");
        assert!(!d1.passed, "corpus {i}");
    }
}
