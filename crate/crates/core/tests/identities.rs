//! Cross-route verification of the intertwining identities: finite
//! differences on quadrature evaluations against the algebraic operator
//! images, on sigma-pairs and perturbed pairs.

use nalgebra::DVector;
use std::sync::Arc;

use nilspec::algebra::{
    h_type_space, perturbed_h_type_space, sigma_deform, sigma_from_partition, EndomorphismSpace,
};
use nilspec::funcspace::{make_one_pole, GeneratorProfile, PoleBasis, TwistedFunction};
use nilspec::intertwine::{
    identity_check_second_radial, identity_check_z_neumann, sample_points,
    verify_intertwines_laplacian, verify_mf_and_delta_zf, KappaOperator,
};
use nilspec::quad::QuadSpec;

fn sigma_pair() -> (Arc<EndomorphismSpace>, Arc<EndomorphismSpace>) {
    let s11 = h_type_space(3, 1, 1).unwrap();
    let sigma = sigma_from_partition(&s11).unwrap();
    let s20 = sigma_deform(&s11, &sigma).unwrap();
    (Arc::new(s11), Arc::new(s20))
}

fn quad() -> QuadSpec {
    QuadSpec::preset("l3-default").unwrap()
}

#[test]
fn mf_and_delta_zf_identities_hold() {
    let (s11, _) = sigma_pair();
    let basis = PoleBasis::constant_default(&s11).unwrap();
    let pole = match &*basis {
        PoleBasis::Constant(c) => &c.vectors[0] * 0.9 + &c.vectors[2] * 0.7,
        _ => unreachable!(),
    };
    let f = make_one_pole(
        Arc::clone(&s11),
        Arc::clone(&basis),
        &pole,
        2,
        1,
        GeneratorProfile::standard_gaussian(),
    )
    .unwrap();
    let samples = sample_points(8, 3, 8, 42, 0.9, 0.8);
    let (m_rep, dz_rep) = verify_mf_and_delta_zf(&s11, &f, &samples, &quad(), 1e-5, 1e-3).unwrap();
    assert!(m_rep.passed, "MF max residual {}", m_rep.max_residual);
    assert!(
        dz_rep.passed,
        "DeltaZF max residual {}",
        dz_rep.max_residual
    );
}

#[test]
fn mf_vanishes_for_balanced_exponents() {
    // p = q termwise: M f = 0 to tolerance
    let (s11, _) = sigma_pair();
    let basis = PoleBasis::changing(&s11);
    let f = TwistedFunction::plain(
        Arc::clone(&s11),
        basis,
        vec![(1, 1), (0, 0), (2, 2), (0, 0)],
        GeneratorProfile::standard_gaussian(),
    )
    .unwrap();
    let q = quad();
    let (x, z) = (
        DVector::from_vec(vec![0.4, -0.2, 0.1, 0.6, 0.3, 0.2, -0.5, 0.1]),
        DVector::from_vec(vec![0.3, 0.4, -0.2]),
    );
    let f_eval = |xx: &DVector<f64>, zz: &DVector<f64>| f.eval(xx, zz, &q).unwrap();
    let m = nilspec::operators::m_operator(&s11, &f_eval, &x, &z, 1e-3).unwrap();
    let scale = f.eval(&x, &z, &q).unwrap().norm();
    assert!(m.norm() < 1e-5 * scale.max(1.0), "M f = {m}");
}

#[test]
fn sphere_fourier_m_eigenvalue() {
    // M eigenvalue of the sphere-supported transform has magnitude
    // |p - q| R_Z; the ledger sign makes it (q - p) R_Z
    let (s11, _) = sigma_pair();
    let r_z = 1.3;
    let (p, q) = (2u8, 1u8);
    let pole = DVector::from_fn(8, |i, _| if i == 0 { 1.0 } else { 0.0 });
    let phi = |_: f64, _: &DVector<f64>| num_complex::Complex64::new(1.0, 0.0);
    let qspec = quad();
    let f_eval = |x: &DVector<f64>, z: &DVector<f64>| {
        nilspec::funcspace::eval_sphere_fourier(&s11, &pole, p, q, r_z, &phi, x, z, &qspec).unwrap()
    };
    let x = DVector::from_vec(vec![0.5, -0.2, 0.3, 0.4, 0.1, 0.2, -0.3, 0.2]);
    let z = DVector::from_vec(vec![0.4, 0.1, -0.3]);
    let m = nilspec::operators::m_operator(&s11, &f_eval, &x, &z, 1e-3).unwrap();
    let val = f_eval(&x, &z);
    let ratio = m / val;
    let want = (q as f64 - p as f64) * r_z;
    assert!(
        (ratio.re - want).abs() < 2e-3 * want.abs().max(1.0) && ratio.im.abs() < 2e-3,
        "ratio {ratio}, want {want}"
    );
    assert!(
        (ratio.norm() - (p as f64 - q as f64).abs() * r_z).abs() < 2e-3,
        "magnitude {}",
        ratio.norm()
    );
}

#[test]
fn full_laplacian_intertwines_on_sigma_pair() {
    let (s11, s20) = sigma_pair();
    let basis = PoleBasis::constant_default(&s11).unwrap();
    let op = KappaOperator::new(
        Arc::clone(&s11),
        Arc::clone(&s20),
        Arc::clone(&basis),
        quad(),
    )
    .unwrap();
    let pole = match &*basis {
        PoleBasis::Constant(c) => &c.vectors[1] * 0.8 - &c.vectors[3] * 0.6,
        _ => unreachable!(),
    };
    let f = make_one_pole(
        Arc::clone(&s11),
        Arc::clone(&basis),
        &pole,
        1,
        1,
        GeneratorProfile::standard_gaussian(),
    )
    .unwrap();
    let samples = sample_points(8, 3, 8, 7, 0.9, 0.8);
    let rep = verify_intertwines_laplacian(&op, &f, &samples, 1e-4, 1e-3).unwrap();
    assert!(rep.passed, "max residual {}", rep.max_residual);
}

#[test]
fn full_laplacian_intertwines_identity_pair() {
    // target = source: residual at stencil-noise level
    let (s11, _) = sigma_pair();
    let basis = PoleBasis::constant_default(&s11).unwrap();
    let op = KappaOperator::new(
        Arc::clone(&s11),
        Arc::clone(&s11),
        Arc::clone(&basis),
        quad(),
    )
    .unwrap();
    let pole = match &*basis {
        PoleBasis::Constant(c) => c.vectors[0].clone(),
        _ => unreachable!(),
    };
    let f = make_one_pole(
        Arc::clone(&s11),
        Arc::clone(&basis),
        &pole,
        2,
        0,
        GeneratorProfile::standard_gaussian(),
    )
    .unwrap();
    let samples = sample_points(8, 3, 6, 9, 0.9, 0.8);
    let rep = verify_intertwines_laplacian(&op, &f, &samples, 1e-4, 1e-3).unwrap();
    assert!(rep.passed, "max residual {}", rep.max_residual);
}

#[test]
fn full_laplacian_intertwines_on_perturbed_pair_changing_basis() {
    let p11 = Arc::new(perturbed_h_type_space(3, 1, 1, 0.02, 42).unwrap());
    let p20 = Arc::new(perturbed_h_type_space(3, 2, 0, 0.02, 42).unwrap());
    let basis = PoleBasis::changing(&p11);
    let op = KappaOperator::new(Arc::clone(&p11), Arc::clone(&p20), basis, quad()).unwrap();
    let f = TwistedFunction::plain(
        Arc::clone(&p11),
        Arc::clone(&op.basis),
        vec![(1, 0), (0, 1), (0, 0), (0, 0)],
        GeneratorProfile::standard_gaussian(),
    )
    .unwrap();
    let samples = sample_points(8, 3, 8, 13, 0.9, 0.8);
    let rep = verify_intertwines_laplacian(&op, &f, &samples, 1e-4, 1e-3).unwrap();
    assert!(rep.passed, "max residual {}", rep.max_residual);
}

#[test]
fn z_neumann_identity_prefactor_oracle() {
    // the polar-coordinate reduction picks -1/|Z| over the printed -|Z|
    let (s11, _) = sigma_pair();
    let basis = PoleBasis::constant_default(&s11).unwrap();
    let pole = match &*basis {
        PoleBasis::Constant(c) => c.vectors[0].clone(),
        _ => unreachable!(),
    };
    let f = make_one_pole(
        Arc::clone(&s11),
        Arc::clone(&basis),
        &pole,
        1,
        0,
        GeneratorProfile::standard_gaussian(),
    )
    .unwrap();
    let samples = sample_points(8, 3, 8, 21, 0.8, 0.9);
    let (chosen, rep) = identity_check_z_neumann(&f, &samples, &quad(), 1e-4, 1e-3).unwrap();
    assert_eq!(chosen, "-1/|Z|");
    assert!(rep.passed, "max residual {}", rep.max_residual);
}

#[test]
fn second_radial_constant_oracle() {
    // the integration by parts gives l(l+1), not the printed l
    let (s11, _) = sigma_pair();
    let basis = PoleBasis::constant_default(&s11).unwrap();
    let pole = match &*basis {
        PoleBasis::Constant(c) => c.vectors[1].clone(),
        _ => unreachable!(),
    };
    let f = make_one_pole(
        Arc::clone(&s11),
        Arc::clone(&basis),
        &pole,
        1,
        0,
        GeneratorProfile::standard_gaussian(),
    )
    .unwrap();
    let samples = sample_points(8, 3, 8, 23, 0.8, 0.9);
    let (chosen, rep) = identity_check_second_radial(&f, &samples, &quad(), 1e-4, 1e-3).unwrap();
    assert_eq!(chosen, "l(l+1)");
    assert!(rep.passed, "max residual {}", rep.max_residual);
}
