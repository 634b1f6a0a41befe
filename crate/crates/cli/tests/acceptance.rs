//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line with its runtime. Run with `--nocapture` for the full listing:
//!
//! ```text
//! cargo test -p nilspec-cli --test acceptance -- --nocapture
//! ```

use nalgebra::DVector;
use std::sync::Arc;
use std::time::Instant;

use nilspec::algebra::{
    build_irreducible_clifford, h_type_space, perturbed_h_type_space, sigma_deform,
    sigma_from_partition, EndomorphismSpace,
};
use nilspec::funcspace::{make_one_pole, GeneratorProfile, PoleBasis, TwistedFunction};
use nilspec::intertwine::{
    boundary_laplacian_check, build_z_neumann_one_pole, dirichlet_check,
    identity_check_second_radial, identity_check_z_neumann, independence_negative_control,
    independence_rank_test, kappa_signs_consistent, neumann_normal, parity_decompose,
    sample_points, verify_intertwines_laplacian, verify_mf_and_delta_zf, z_neumann_check,
    CutoffTwisted, DomainShape, IndependenceConfig, KappaOperator, RadiusFn,
};
use nilspec::operators::apply_d_v;
use nilspec::poly::{crat, CRat, PolyExpr, PolyRat};
use nilspec::quad::QuadSpec;
use nilspec::radon::{
    dual_radon, duality_pairing_check, invert_dual_radon_odd, PolarFunction, RadonSpec,
};
use nilspec::spectra::{box_spectrum, compare_spectra};

use nilspec_cli::config::RunConfig;
use nilspec_cli::suites::run_suite;

struct Criterion {
    id: usize,
    name: &'static str,
    budget_secs: f64,
    start: Instant,
}

impl Criterion {
    fn begin(id: usize, name: &'static str, budget_secs: f64) -> Self {
        Criterion {
            id,
            name,
            budget_secs,
            start: Instant::now(),
        }
    }

    fn finish(self, passed: bool) {
        let elapsed = self.start.elapsed().as_secs_f64();
        eprintln!(
            "criterion {:>2} [{}] {} in {:.2}s (budget {}s)",
            self.id,
            self.name,
            if passed { "PASS" } else { "FAIL" },
            elapsed,
            self.budget_secs
        );
        assert!(passed, "criterion {} failed: {}", self.id, self.name);
        assert!(
            elapsed < self.budget_secs,
            "criterion {} overran its budget: {:.2}s > {}s",
            self.id,
            elapsed,
            self.budget_secs
        );
    }
}

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
fn criterion_01_clifford_construction() {
    let c = Criterion::begin(1, "clifford generators, exact integer arithmetic", 1.0);
    let mut ok = true;
    for l in [1usize, 2, 3, 7] {
        let m = build_irreducible_clifford(l).unwrap();
        let g = m.generators_int().unwrap();
        let id = nalgebra::DMatrix::<i64>::identity(m.r, m.r);
        for a in 0..l {
            for b in 0..l {
                let anti = &g[a] * &g[b] + &g[b] * &g[a];
                let want = if a == b {
                    &id * -2
                } else {
                    nalgebra::DMatrix::zeros(m.r, m.r)
                };
                ok &= anti == want;
            }
        }
    }
    c.finish(ok);
}

#[test]
fn criterion_02_theta_eigenrelation() {
    let c = Criterion::begin(2, "theta eigenrelation, symbolic, p+q <= 6", 10.0);
    let mut ok = true;
    for (a, b) in [(1usize, 1usize), (2, 0)] {
        let space = h_type_space(3, a, b).unwrap();
        let j1 = space.generators_int().unwrap()[0].clone();
        let k = space.k;
        let vnorm = 3i64;
        let jv: Vec<Vec<CRat>> = (0..k)
            .map(|m| (0..k).map(|n| crat(vnorm * j1[(m, n)], 1, 0, 1)).collect())
            .collect();
        let q: Vec<i64> = (0..k).map(|i| (i as i64 % 5) - 2).collect();
        let mut coeffs = Vec::new();
        let mut conj = Vec::new();
        for m in 0..k {
            let mut jq = 0i64;
            for n in 0..k {
                jq += j1[(m, n)] * q[n];
            }
            coeffs.push(crat(q[m], 1, jq, 1));
            conj.push(crat(q[m], 1, -jq, 1));
        }
        let theta: PolyRat = PolyExpr::linear_form(&coeffs);
        let theta_bar: PolyRat = PolyExpr::linear_form(&conj);
        // the (1,0) oracle fixes s = -1: D_V Theta = +i |V| Theta
        let dv = apply_d_v(&theta, &jv);
        ok &= (&dv - &theta.scale(&crat(0, 1, vnorm, 1))).is_zero();
        ok &= !(&dv - &theta.scale(&crat(0, 1, -vnorm, 1))).is_zero();
        for p in 0..=6u32 {
            for qq in 0..=(6 - p) {
                if p + qq == 0 {
                    continue;
                }
                let f = &theta.pow(p) * &theta_bar.pow(qq);
                let dv = apply_d_v(&f, &jv);
                let want = f.scale(&crat(0, 1, (p as i64 - qq as i64) * vnorm, 1));
                ok &= dv == want;
            }
        }
    }
    c.finish(ok);
}

#[test]
fn criterion_03_harmonic_projection() {
    let c = Criterion::begin(3, "harmonic projection exact, n <= 6, k in {2,4,8}", 30.0);
    let mut ok = true;
    for k in [2usize, 4, 8] {
        for n in 2..=6u32 {
            let mut p: PolyRat = PolyExpr::var(k, 0).pow(n);
            p = &p + &(&PolyExpr::var(k, 1).pow(n - 1) * &PolyExpr::var(k, k - 1));
            let proj = nilspec::operators::harmonic_projection(&p).unwrap();
            ok &= proj.laplacian().is_zero();
            let diff = &p - &proj;
            if !diff.is_zero() {
                ok &= diff.homogeneous_degree() == Some(n);
            }
        }
    }
    c.finish(ok);
}

#[test]
fn criterion_04_intertwining_identities() {
    let c = Criterion::begin(4, "MF and DeltaZF identities at 20 samples", 300.0);
    let (s11, s20) = sigma_pair();
    let basis = PoleBasis::constant_default(&s11).unwrap();
    let pole = match &*basis {
        PoleBasis::Constant(cb) => &cb.vectors[0] * 0.9 + &cb.vectors[2] * 0.7,
        _ => unreachable!(),
    };
    let samples = sample_points(8, 3, 20, 42, 0.9, 0.8);
    let mut ok = true;
    for space in [&s11, &s20] {
        let f = make_one_pole(
            Arc::clone(space),
            Arc::clone(&basis),
            &pole,
            2,
            1,
            GeneratorProfile::standard_gaussian(),
        )
        .unwrap();
        let (m_rep, dz_rep) =
            verify_mf_and_delta_zf(space, &f, &samples, &quad(), 1e-5, 1e-3).unwrap();
        ok &= m_rep.passed && dz_rep.passed;
    }
    c.finish(ok);
}

#[test]
fn criterion_05_full_laplacian_intertwining() {
    let c = Criterion::begin(
        5,
        "full-Laplacian intertwining, sigma and perturbed pairs",
        600.0,
    );
    let samples = sample_points(8, 3, 20, 7, 0.9, 0.8);
    // (i) the sigma-pair with a constant basis
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
        PoleBasis::Constant(cb) => &cb.vectors[1] * 0.8 - &cb.vectors[3] * 0.6,
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
    let rep1 = verify_intertwines_laplacian(&op, &f, &samples, 1e-4, 1e-3).unwrap();
    // (ii) the perturbed pair with a changing basis
    let p11 = Arc::new(perturbed_h_type_space(3, 1, 1, 0.02, 42).unwrap());
    let p20 = Arc::new(perturbed_h_type_space(3, 2, 0, 0.02, 42).unwrap());
    let cbasis = PoleBasis::changing(&p11);
    let op2 = KappaOperator::new(Arc::clone(&p11), Arc::clone(&p20), cbasis, quad()).unwrap();
    let f2 = TwistedFunction::plain(
        Arc::clone(&p11),
        Arc::clone(&op2.basis),
        vec![(1, 0), (0, 1), (0, 0), (0, 0)],
        GeneratorProfile::standard_gaussian(),
    )
    .unwrap();
    let rep2 = verify_intertwines_laplacian(&op2, &f2, &samples, 1e-4, 1e-3).unwrap();
    c.finish(rep1.passed && rep2.passed);
}

#[test]
fn criterion_06_central_isospectrality() {
    let c = Criterion::begin(6, "Box spectra agree at N = 6", 120.0);
    let s11 = h_type_space(3, 1, 1).unwrap();
    let s20 = h_type_space(3, 2, 0).unwrap();
    let p11 = perturbed_h_type_space(3, 1, 1, 0.02, 42).unwrap();
    let p20 = perturbed_h_type_space(3, 2, 0, 0.02, 42).unwrap();
    let gammas = [
        DVector::from_vec(vec![1.0, 0.0, 0.0]),
        DVector::from_vec(vec![1.0, 1.0, 0.0]),
        DVector::from_vec(vec![0.31, -0.84, 0.52]),
    ];
    let mut ok = true;
    for gamma in &gammas {
        let a = box_spectrum(&s11, gamma, 6, "H(1,1)_3").unwrap();
        let b = box_spectrum(&s20, gamma, 6, "H(2,0)_3").unwrap();
        let v = compare_spectra(&a, &b, 1e-9).unwrap();
        ok &= v.verdict;
        let pa = box_spectrum(&p11, gamma, 6, "P(1,1)_3").unwrap();
        let pb = box_spectrum(&p20, gamma, 6, "P(2,0)_3").unwrap();
        let v = compare_spectra(&pa, &pb, 1e-9).unwrap();
        ok &= v.verdict;
    }
    c.finish(ok);
}

#[test]
fn criterion_07_dual_radon() {
    let c = Criterion::begin(7, "dual Radon value, pairing, odd inversion", 300.0);
    let mut ok = true;
    // f = 1 gives 2 pi for l = 3, to 1e-6
    let spec = RadonSpec::default_l3();
    let one = |_: &DVector<f64>, _: f64| 1.0;
    let pf = PolarFunction {
        l: 3,
        f: &one,
        support_radius: f64::INFINITY,
    };
    let z = DVector::from_vec(vec![0.7, -0.4, 1.1]);
    let got = dual_radon(&pf, &z, &spec).unwrap();
    ok &= (got - 2.0 * std::f64::consts::PI).abs() <= 1e-6;
    // duality pairing residual <= 1e-4
    let pspec = RadonSpec {
        n_polar: 16,
        n_azimuth: 32,
        n_plane: 40,
        plane_halfwidth: 4.5,
        deriv_step: 0.12,
    };
    let mu = |z: &DVector<f64>| {
        if z.norm() <= 4.0 {
            (-z.norm_squared()).exp()
        } else {
            0.0
        }
    };
    let (_, _, residual) = duality_pairing_check(&pf, &mu, 4.0, &pspec).unwrap();
    ok &= residual <= 1e-4;
    // odd inversion round trip, relative L2 <= 1e-2 at the documented
    // resolution (reconstruction domain r >= 0.4 clears the origin cusp)
    let rspec = RadonSpec {
        n_polar: 20,
        n_azimuth: 40,
        n_plane: 64,
        plane_halfwidth: 16.0,
        deriv_step: 0.1,
    };
    let f = |theta: &DVector<f64>, r: f64| (-r * r).exp() * (theta[2] + 0.3 * theta[0]);
    let pf = PolarFunction {
        l: 3,
        f: &f,
        support_radius: f64::INFINITY,
    };
    let f_tau = |z: &DVector<f64>| dual_radon(&pf, z, &rspec).unwrap();
    let thetas = [
        DVector::from_vec(vec![0.0, 0.0, 1.0]),
        DVector::from_vec(vec![0.48, 0.64, 0.6]),
    ];
    let mut num = 0.0;
    let mut den = 0.0;
    for theta in &thetas {
        for r in [0.4, 0.7, 1.0, 1.3] {
            let want = f(theta, r);
            let got = invert_dual_radon_odd(&f_tau, 3, 30.0, theta, r, &rspec).unwrap();
            num += (got - want) * (got - want);
            den += want * want;
        }
    }
    ok &= (num / den).sqrt() <= 1e-2;
    c.finish(ok);
}

#[test]
fn criterion_08_parity_and_kappa_signs() {
    let c = Criterion::begin(8, "parity reconstruction and kappa signs", 10.0);
    let (s11, s20) = sigma_pair();
    let basis = PoleBasis::constant_default(&s11).unwrap();
    let pole = match &*basis {
        PoleBasis::Constant(cb) => &cb.vectors[0] * 0.8 - &cb.vectors[3] * 0.6,
        _ => unreachable!(),
    };
    let mut ok = true;
    for (p, q) in [(1u8, 0u8), (1, 1), (2, 1)] {
        let f = make_one_pole(
            Arc::clone(&s11),
            Arc::clone(&basis),
            &pole,
            p,
            q,
            GeneratorProfile::standard_gaussian(),
        )
        .unwrap();
        let parts = parity_decompose(&f).unwrap();
        ok &= kappa_signs_consistent(&parts);
        // reconstruction and sign action at deterministic points
        for i in 0..6 {
            let x = DVector::from_fn(8, |j, _| 0.1 + 0.07 * ((i + j) as f64 % 5.0));
            let vu = DVector::from_vec(vec![0.6, 0.8, 0.0]);
            let th = nilspec::funcspace::theta(&s11, &pole, &x, &vu).unwrap();
            let mut want = num_complex::Complex64::new(1.0, 0.0);
            for _ in 0..p {
                want *= th;
            }
            for _ in 0..q {
                want *= th.conj();
            }
            let got: num_complex::Complex64 = parts
                .iter()
                .map(|pp| pp.integrand_at(&x, &vu).unwrap())
                .sum();
            ok &= (want - got).norm() <= 1e-12 * want.norm().max(1.0);
            for part in &parts {
                let rb = part.rebind(Arc::clone(&s20));
                let a = part.integrand_at(&x, &vu).unwrap();
                let b = rb.integrand_at(&x, &vu).unwrap();
                ok &= (a * part.tag.kappa_sign() - b).norm() <= 1e-12 * a.norm().max(1e-12);
            }
        }
    }
    c.finish(ok);
}

#[test]
fn criterion_09_independence_rank() {
    let c = Criterion::begin(9, "Gram-rank additivity, n <= 4, threshold 1e-8", 120.0);
    let mut ok = true;
    for (a, b) in [(1usize, 1usize), (2, 0)] {
        let space = Arc::new(h_type_space(3, a, b).unwrap());
        for degree in [2u8, 4] {
            let cfg = IndependenceConfig::desk_scale(degree, IndependenceConfig::rank_quad());
            let v = independence_rank_test(&space, &cfg).unwrap();
            ok &= v.additivity;
        }
    }
    // negative control fails as designed
    let space = Arc::new(h_type_space(3, 1, 1).unwrap());
    let cfg = IndependenceConfig::desk_scale(2, IndependenceConfig::rank_quad());
    ok &= independence_negative_control(&space, &cfg).unwrap();
    c.finish(ok);
}

#[test]
fn criterion_10_boundary_suite() {
    let c = Criterion::begin(10, "boundary verdicts, oracles and span residual", 600.0);
    let (s11, s20) = sigma_pair();
    let basis = PoleBasis::constant_default(&s11).unwrap();
    let q = quad();
    let op = KappaOperator::new(
        Arc::clone(&s11),
        Arc::clone(&s20),
        Arc::clone(&basis),
        q.clone(),
    )
    .unwrap();
    let domain = DomainShape::SphereBall { r_x: 1.0, r_z: 0.8 };
    let samples = domain.boundary_samples(8, 3, 6, 37, 0.05);
    let vectors = match &*basis {
        PoleBasis::Constant(cb) => cb.vectors.clone(),
        _ => unreachable!(),
    };
    let mut ok = true;

    // Dirichlet and Z-Neumann verdicts agree between f and kappa f on a
    // 10-function cutoff corpus
    let mut corpus = Vec::new();
    for i in 0..5 {
        let pole = &vectors[i % 4] * (1.0 - 0.1 * i as f64) + &vectors[(i + 2) % 4] * 0.3;
        for (p, qq) in [(1u8, 0u8), (1, 1)] {
            corpus.push(
                make_one_pole(
                    Arc::clone(&s11),
                    Arc::clone(&basis),
                    &pole,
                    p,
                    qq,
                    GeneratorProfile::standard_gaussian(),
                )
                .unwrap(),
            );
        }
    }
    assert_eq!(corpus.len(), 10);
    for inner in corpus {
        let interior_x = DVector::from_element(8, 0.25);
        let interior_z = DVector::from_element(3, 0.1);
        for power in [1u8, 2] {
            let cut = CutoffTwisted {
                inner: inner.clone(),
                domain: domain.clone(),
                power,
                quad: q.clone(),
            };
            let kcut = cut.apply_kappa(&op).unwrap();
            let scale = cut.eval(&interior_x, &interior_z).unwrap().norm().max(1e-6);
            let ce = |x: &DVector<f64>, z: &DVector<f64>| cut.eval(x, z).unwrap();
            let kce = |x: &DVector<f64>, z: &DVector<f64>| kcut.eval(x, z).unwrap();
            if power == 1 {
                let d1 = dirichlet_check(&ce, &domain, &samples, scale, 1e-10);
                let d2 = dirichlet_check(&kce, &domain, &samples, scale, 1e-10);
                ok &= d1.passed == d2.passed && d1.passed;
            } else {
                let r1 = z_neumann_check(&ce, &samples, scale, 1e-4, 1e-3);
                let r2 = z_neumann_check(&kce, &samples, scale, 1e-4, 1e-3);
                ok &= r1.passed == r2.passed && r1.passed;
            }
        }
    }

    // the Z-radial prefactor and second-radial constant oracles, with the
    // selected identities holding at 1e-4
    let g = make_one_pole(
        Arc::clone(&s11),
        Arc::clone(&basis),
        &vectors[0],
        1,
        0,
        GeneratorProfile::standard_gaussian(),
    )
    .unwrap();
    let id_samples = sample_points(8, 3, 8, 21, 0.8, 0.9);
    let (chosen, rep) = identity_check_z_neumann(&g, &id_samples, &q, 1e-4, 1e-3).unwrap();
    ok &= chosen == "-1/|Z|" && rep.passed;
    let (chosen, rep) = identity_check_second_radial(&g, &id_samples, &q, 1e-4, 1e-3).unwrap();
    ok &= chosen == "l(l+1)" && rep.passed;

    // the boundary Laplacian intertwines on the Z-Neumann mixture corpus
    let f = build_z_neumann_one_pole(
        Arc::clone(&s11),
        Arc::clone(&basis),
        &vectors[0],
        1,
        0,
        0.9,
        &[0.5, 0.8, 1.25],
        &q,
        91,
    )
    .unwrap();
    let rep = boundary_laplacian_check(&op, &f, 1.0, 0.9, 6, 29, 1e-4, 1e-3).unwrap();
    ok &= rep.passed;

    // normal-vector span residual <= 1e-8
    let ball = DomainShape::BallType {
        r_x: 1.0,
        radius: RadiusFn {
            coeffs: vec![0.9, 0.0, -0.25],
        },
    };
    let bsamples = ball.boundary_samples(8, 3, 50, 11, 0.05);
    for (x, z) in &bsamples {
        let n = neumann_normal(&s11, &ball, x, z, 1e-4, false)
            .unwrap()
            .unwrap();
        ok &= n.span_residual <= 1e-8;
    }
    c.finish(ok);
}

#[test]
fn criterion_11_reproducibility() {
    let c = Criterion::begin(11, "byte-identical reports for equal config hash", 120.0);
    let cfg = RunConfig::default();
    let a = run_suite("clifford", &cfg, 1).unwrap();
    let b = run_suite("clifford", &cfg, 1).unwrap();
    let ja = serde_json::to_string(&a).unwrap();
    let jb = serde_json::to_string(&b).unwrap();
    let mut ok = ja == jb && a.config_hash == b.config_hash;
    // a quadrature-heavy suite must reproduce too
    let a = run_suite("independence", &cfg, 1).unwrap();
    let b = run_suite("independence", &cfg, 1).unwrap();
    ok &= serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap();
    c.finish(ok);
}
