//! Named verification suites: each builds its objects from the run
//! configuration and returns verdict reports.

use nalgebra::DVector;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use rayon::prelude::*;
use serde::Serialize;

use nilspec::algebra::{self, EndomorphismSpace};
use nilspec::funcspace::{make_one_pole, GeneratorProfile, PoleBasis, TwistedFunction};
use nilspec::intertwine::{
    self, boundary_laplacian_check, build_z_neumann_one_pole, dirichlet_check,
    identity_check_second_radial, identity_check_z_neumann, independence_negative_control,
    independence_rank_test, kappa_signs_consistent, neumann_normal, parity_decompose,
    sample_points, verify_intertwines_laplacian, verify_mf_and_delta_zf, CutoffTwisted,
    DomainShape, IndependenceConfig, KappaOperator, RadiusFn,
};
use nilspec::operators::{apply_d_v, harmonic_projection};
use nilspec::poly::{crat, CRat, PolyExpr, PolyRat};
use nilspec::report::{CheckReport, CheckRow};

use crate::config::{default_tolerances, RunConfig};

pub const SUITES: &[&str] = &[
    "clifford",
    "theta-eigen",
    "projection",
    "intertwine-laplacian",
    "parity",
    "independence",
    "dirichlet",
    "z-neumann",
    "neumann",
    "boundary",
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub config_hash: String,
    pub tool_version: String,
    pub tolerances: BTreeMap<String, f64>,
    pub reports: Vec<CheckReport>,
    pub passed: bool,
}

impl SuiteOutcome {
    fn new(suite: &str, cfg: &RunConfig, reports: Vec<CheckReport>) -> Self {
        let mut tolerances = default_tolerances();
        for (k, v) in &cfg.tolerances {
            tolerances.insert(k.clone(), *v);
        }
        let passed = reports.iter().all(|r| r.passed);
        SuiteOutcome {
            suite: suite.to_string(),
            config_hash: cfg.hash(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances,
            reports,
            passed,
        }
    }
}

/// The sigma-equivalent pair the intertwining suites run on.
fn build_pair(cfg: &RunConfig) -> anyhow::Result<(Arc<EndomorphismSpace>, Arc<EndomorphismSpace>)> {
    let source = Arc::new(cfg.group.build()?);
    let target = Arc::new(cfg.group.sigma_partner().build()?);
    Ok((source, target))
}

fn build_basis(cfg: &RunConfig, space: &Arc<EndomorphismSpace>) -> anyhow::Result<Arc<PoleBasis>> {
    Ok(match cfg.basis.as_str() {
        "changing" => PoleBasis::changing(space),
        _ => PoleBasis::constant_default(space)?,
    })
}

fn constant_vectors(basis: &PoleBasis) -> anyhow::Result<Vec<DVector<f64>>> {
    match basis {
        PoleBasis::Constant(c) => Ok(c.vectors.clone()),
        _ => bail!("this suite needs a constant basis"),
    }
}

pub fn run_suite(name: &str, cfg: &RunConfig, threads: usize) -> anyhow::Result<SuiteOutcome> {
    init_rayon(threads);
    let reports = match name {
        "clifford" => suite_clifford(cfg)?,
        "theta-eigen" => suite_theta_eigen(cfg)?,
        "projection" => suite_projection(cfg)?,
        "intertwine-laplacian" => suite_intertwine(cfg)?,
        "parity" => suite_parity(cfg)?,
        "independence" => suite_independence(cfg)?,
        "dirichlet" => suite_dirichlet(cfg)?,
        "z-neumann" => suite_z_neumann(cfg)?,
        "neumann" => suite_neumann(cfg)?,
        "boundary" => suite_boundary(cfg)?,
        other => bail!(
            "unknown suite '{}'; available: {}",
            other,
            SUITES.join(", ")
        ),
    };
    Ok(SuiteOutcome::new(name, cfg, reports))
}

fn init_rayon(threads: usize) {
    if threads > 1 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn exact_row(check: &str, sample: usize, deviation: f64, tol: f64) -> CheckRow {
    CheckRow {
        check: check.to_string(),
        sample,
        lhs: [deviation, 0.0],
        rhs: [0.0, 0.0],
        residual: deviation,
        verdict: deviation <= tol,
    }
}

fn suite_clifford(cfg: &RunConfig) -> anyhow::Result<Vec<CheckReport>> {
    let mut rows = Vec::new();
    for (i, l) in [1usize, 2, 3, 7].into_iter().enumerate() {
        let m = algebra::build_irreducible_clifford(l)?;
        let gens = m
            .generators_int()
            .ok_or_else(|| anyhow!("expected integer generators"))?;
        let mut exact = true;
        let r = m.r;
        let id = nalgebra::DMatrix::<i64>::identity(r, r);
        for a in 0..l {
            for b in 0..l {
                let anti = &gens[a] * &gens[b] + &gens[b] * &gens[a];
                let want = if a == b {
                    &id * -2
                } else {
                    nalgebra::DMatrix::zeros(r, r)
                };
                exact &= anti == want;
            }
        }
        rows.push(exact_row(
            "clifford-anticommutators",
            i,
            if exact { 0.0 } else { 1.0 },
            0.0,
        ));
    }
    let rep = CheckReport::from_rows("clifford-anticommutators", 0.0, rows)
        .with_note("exact integer arithmetic over l in {1, 2, 3, 7}");

    // J_Z^2 + |Z|^2 I = 0 on the configured group
    let space = cfg.group.build()?;
    let mut rng = rand_seed(cfg.seed);
    let mut rows = Vec::new();
    let id = nalgebra::DMatrix::<f64>::identity(space.k, space.k);
    let tol = if space.is_cliffordian() {
        1e-12
    } else {
        f64::MAX
    };
    for i in 0..100 {
        let z = DVector::from_fn(space.l, |_, _| rand_range(&mut rng));
        let jz = space.j_of(&z)?;
        let res = (&jz * &jz + &id * z.norm_squared()).amax();
        rows.push(exact_row("clifford-square", i, res, tol));
    }
    let rep2 = CheckReport::from_rows("clifford-square", tol, rows);
    Ok(vec![rep, rep2])
}

// small deterministic generator, avoids pulling rand into every suite fn
fn rand_seed(seed: u64) -> u64 {
    seed.wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407)
}

fn rand_range(state: &mut u64) -> f64 {
    *state = state
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    ((*state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
}

fn suite_theta_eigen(cfg: &RunConfig) -> anyhow::Result<Vec<CheckReport>> {
    // exact symbolic eigenrelation on the Cliffordian group with the same
    // (a, b); V = 3 e_1
    let space = algebra::h_type_space(cfg.group.l, cfg.group.a, cfg.group.b)?;
    let j1 = space.generators_int().unwrap()[0].clone();
    let k = space.k;
    let vnorm = 3i64;
    let jv: Vec<Vec<CRat>> = (0..k)
        .map(|m| (0..k).map(|n| crat(vnorm * j1[(m, n)], 1, 0, 1)).collect())
        .collect();
    let mut coeffs = Vec::with_capacity(k);
    let mut coeffs_conj = Vec::with_capacity(k);
    let q: Vec<i64> = (0..k).map(|i| (i as i64 % 5) - 2).collect();
    for m in 0..k {
        let mut jq = 0i64;
        for n in 0..k {
            jq += j1[(m, n)] * q[n];
        }
        coeffs.push(crat(q[m], 1, jq, 1));
        coeffs_conj.push(crat(q[m], 1, -jq, 1));
    }
    let theta: PolyRat = PolyExpr::linear_form(&coeffs);
    let theta_bar: PolyRat = PolyExpr::linear_form(&coeffs_conj);
    let mut rows = Vec::new();
    let mut idx = 0;
    for p in 0..=6u32 {
        for qq in 0..=(6 - p) {
            if p + qq == 0 {
                continue;
            }
            let f = &theta.pow(p) * &theta_bar.pow(qq);
            let dv = apply_d_v(&f, &jv);
            // s = -1: eigenvalue i (p - q) |V|
            let want = f.scale(&crat(0, 1, (p as i64 - qq as i64) * vnorm, 1));
            let exact = dv == want;
            rows.push(exact_row(
                "theta-eigenrelation",
                idx,
                if exact { 0.0 } else { 1.0 },
                0.0,
            ));
            idx += 1;
        }
    }
    Ok(vec![CheckReport::from_rows(
        "theta-eigenrelation",
        0.0,
        rows,
    )
    .with_note(
        "global sign s = -1 fixed by the (p, q) = (1, 0) oracle",
    )])
}

fn suite_projection(cfg: &RunConfig) -> anyhow::Result<Vec<CheckReport>> {
    let _ = cfg;
    let mut rows = Vec::new();
    let mut idx = 0;
    for k in [2usize, 4, 8] {
        for n in 2..=6u32 {
            let mut p: PolyRat = PolyExpr::var(k, 0).pow(n);
            p = &p + &(&PolyExpr::var(k, 1).pow(n - 1) * &PolyExpr::var(k, k - 1));
            let proj = harmonic_projection(&p)?;
            let harmonic = proj.laplacian().is_zero();
            let idempotent = harmonic_projection(&proj)? == proj;
            rows.push(exact_row(
                "harmonic-projection",
                idx,
                if harmonic && idempotent { 0.0 } else { 1.0 },
                0.0,
            ));
            idx += 1;
        }
    }
    Ok(vec![CheckReport::from_rows(
        "harmonic-projection",
        0.0,
        rows,
    )
    .with_note(
        "exact rational arithmetic, n <= 6, k in {2, 4, 8}",
    )])
}

fn one_pole_test_function(
    space: &Arc<EndomorphismSpace>,
    basis: &Arc<PoleBasis>,
    p: u8,
    q: u8,
) -> anyhow::Result<TwistedFunction> {
    let vs = constant_vectors(basis)?;
    let pole = &vs[0] * 0.9 + vs.get(2).map(|v| v * 0.7).unwrap_or_else(|| &vs[0] * 0.0);
    Ok(make_one_pole(
        Arc::clone(space),
        Arc::clone(basis),
        &pole,
        p,
        q,
        GeneratorProfile::standard_gaussian(),
    )?)
}

fn suite_intertwine(cfg: &RunConfig) -> anyhow::Result<Vec<CheckReport>> {
    let (source, target) = build_pair(cfg)?;
    let basis = build_basis(cfg, &source)?;
    let quad = cfg.quad_spec()?;
    let op = KappaOperator::new(
        Arc::clone(&source),
        Arc::clone(&target),
        Arc::clone(&basis),
        quad.clone(),
    )?;
    let f = if matches!(*basis, PoleBasis::Constant(_)) {
        one_pole_test_function(&source, &basis, 2, 1)?
    } else {
        let half = source.k / 2;
        let mut exps = vec![(0u8, 0u8); half];
        exps[0] = (1, 0);
        exps[half.min(2) - 1] = (0, 1);
        TwistedFunction::plain(
            Arc::clone(&source),
            Arc::clone(&basis),
            exps,
            GeneratorProfile::standard_gaussian(),
        )?
    };
    let samples = sample_points(source.k, source.l, cfg.samples, cfg.seed, 0.9, 0.8);
    let h = cfg.tol("stencil-step");
    let (m_rep, dz_rep) =
        verify_mf_and_delta_zf(&source, &f, &samples, &quad, cfg.tol("identity-MF"), h)?;
    let lap = verify_intertwines_laplacian(&op, &f, &samples, cfg.tol("intertwine-laplacian"), h)?;
    Ok(vec![m_rep, dz_rep, lap])
}

fn suite_parity(cfg: &RunConfig) -> anyhow::Result<Vec<CheckReport>> {
    let (source, target) = build_pair(cfg)?;
    if !source.is_cliffordian() {
        bail!("the parity suite runs on Cliffordian groups (constant-basis pole functions)");
    }
    let basis = PoleBasis::constant_default(&source)?;
    let quad = cfg.quad_spec()?;
    let op = KappaOperator::new(
        Arc::clone(&source),
        Arc::clone(&target),
        Arc::clone(&basis),
        quad,
    )?;
    let vs = constant_vectors(&basis)?;
    let pole = &vs[0] * 0.8 - &vs[vs.len() - 1] * 0.6;
    let mut rows_rec = Vec::new();
    let mut rows_sign = Vec::new();
    let mut rng = rand_seed(cfg.seed);
    let mut idx = 0;
    for (p, q) in [(1u8, 0u8), (1, 1), (2, 1)] {
        let f = make_one_pole(
            Arc::clone(&source),
            Arc::clone(&basis),
            &pole,
            p,
            q,
            GeneratorProfile::standard_gaussian(),
        )?;
        let parts = parity_decompose(&f)?;
        let signs_ok = kappa_signs_consistent(&parts);
        for _ in 0..5 {
            let x = DVector::from_fn(source.k, |_, _| rand_range(&mut rng));
            let vu = {
                let v = DVector::from_fn(source.l, |_, _| rand_range(&mut rng));
                v.normalize()
            };
            let want = {
                let th = nilspec::funcspace::theta(&source, &pole, &x, &vu)?;
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..p {
                    acc *= th;
                }
                for _ in 0..q {
                    acc *= th.conj();
                }
                acc
            };
            let got: Complex64 = parts
                .iter()
                .map(|pp| pp.integrand_at(&x, &vu).unwrap())
                .sum();
            let res = (want - got).norm() / want.norm().max(1e-12);
            rows_rec.push(exact_row("parity-reconstruction", idx, res, 1e-12));
            // kappa sign action per part
            let mut sign_res: f64 = if signs_ok { 0.0 } else { 1.0 };
            for part in &parts {
                let rb = part.rebind(Arc::clone(&op.target));
                let a = part.integrand_at(&x, &vu).unwrap();
                let b = rb.integrand_at(&x, &vu).unwrap();
                sign_res =
                    sign_res.max((a * part.tag.kappa_sign() - b).norm() / a.norm().max(1e-12));
            }
            rows_sign.push(exact_row("parity-kappa-signs", idx, sign_res, 1e-12));
            idx += 1;
        }
    }
    Ok(vec![
        CheckReport::from_rows("parity-reconstruction", 1e-12, rows_rec),
        CheckReport::from_rows("parity-kappa-signs", 1e-12, rows_sign)
            .with_note("signs (+,-,+,-) in the J^(b)-parity slot"),
    ])
}

fn suite_independence(cfg: &RunConfig) -> anyhow::Result<Vec<CheckReport>> {
    let space = Arc::new(cfg.group.build()?);
    let quad = IndependenceConfig::rank_quad();
    let mut reports = Vec::new();
    for degree in [2u8, 4] {
        let mut icfg = IndependenceConfig::desk_scale(degree, quad.clone());
        icfg.threshold = cfg.tol("independence-threshold");
        icfg.seed = cfg.seed;
        let v = independence_rank_test(&space, &icfg)?;
        let row = CheckRow {
            check: format!("independence-rank-additivity[n={degree}]"),
            sample: 0,
            lhs: [v.rank_union as f64, 0.0],
            rhs: [(v.rank_even + v.rank_odd) as f64, 0.0],
            residual: (v.rank_union as f64 - (v.rank_even + v.rank_odd) as f64).abs(),
            verdict: v.additivity,
        };
        reports.push(
            CheckReport::from_rows(
                format!("independence-rank-additivity[n={degree}]"),
                0.0,
                vec![row],
            )
            .with_note(format!(
                "rank_even = {}, rank_odd = {}, rank_union = {}",
                v.rank_even, v.rank_odd, v.rank_union
            )),
        );
    }
    // negative control
    let mut icfg = IndependenceConfig::desk_scale(2, quad);
    icfg.threshold = cfg.tol("independence-threshold");
    icfg.seed = cfg.seed;
    let failed = independence_negative_control(&space, &icfg)?;
    let row = CheckRow {
        check: "independence-negative-control".to_string(),
        sample: 0,
        lhs: [if failed { 1.0 } else { 0.0 }, 0.0],
        rhs: [1.0, 0.0],
        residual: if failed { 0.0 } else { 1.0 },
        verdict: failed,
    };
    reports.push(
        CheckReport::from_rows("independence-negative-control", 0.0, vec![row])
            .with_note("a planted duplicate must break rank additivity"),
    );
    Ok(reports)
}

fn cutoff_corpus(
    cfg: &RunConfig,
    source: &Arc<EndomorphismSpace>,
    basis: &Arc<PoleBasis>,
    domain: &DomainShape,
    power: u8,
) -> anyhow::Result<Vec<CutoffTwisted>> {
    let quad = cfg.quad_spec()?;
    let vs = constant_vectors(basis)?;
    let mut corpus = Vec::new();
    for i in 0..5 {
        let pole = &vs[i % vs.len()] * (1.0 - 0.1 * i as f64) + &vs[(i + 2) % vs.len()] * 0.3;
        for (p, q) in [(1u8, 0u8), (1, 1)] {
            corpus.push(CutoffTwisted {
                inner: make_one_pole(
                    Arc::clone(source),
                    Arc::clone(basis),
                    &pole,
                    p,
                    q,
                    GeneratorProfile::standard_gaussian(),
                )?,
                domain: domain.clone(),
                power,
                quad: quad.clone(),
            });
        }
    }
    Ok(corpus)
}

fn suite_dirichlet(cfg: &RunConfig) -> anyhow::Result<Vec<CheckReport>> {
    let (source, target) = build_pair(cfg)?;
    let basis = PoleBasis::constant_default(&source)?;
    let quad = cfg.quad_spec()?;
    let op = KappaOperator::new(
        Arc::clone(&source),
        Arc::clone(&target),
        Arc::clone(&basis),
        quad.clone(),
    )?;
    let domain = DomainShape::SphereBall { r_x: 1.0, r_z: 0.8 };
    let corpus = cutoff_corpus(cfg, &source, &basis, &domain, 1)?;
    let samples = domain.boundary_samples(source.k, source.l, 6, cfg.seed, 0.05);
    let tol = cfg.tol("dirichlet");
    // corpus entries are independent; parallel map with order-stable merge
    let row_pairs: Vec<anyhow::Result<[CheckRow; 2]>> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, cut)| {
            let kcut = cut.apply_kappa(&op)?;
            let interior = {
                let x = DVector::from_element(source.k, 0.25);
                let z = DVector::from_element(source.l, 0.1);
                cut.eval(&x, &z)?.norm().max(1e-6)
            };
            let ce = |x: &DVector<f64>, z: &DVector<f64>| cut.eval(x, z).unwrap();
            let kce = |x: &DVector<f64>, z: &DVector<f64>| kcut.eval(x, z).unwrap();
            let d1 = dirichlet_check(&ce, &domain, &samples, interior, tol);
            let d2 = dirichlet_check(&kce, &domain, &samples, interior, tol);
            // negative control: raw functions fail on both sides
            let re = |x: &DVector<f64>, z: &DVector<f64>| cut.inner.eval(x, z, &cut.quad).unwrap();
            let kre =
                |x: &DVector<f64>, z: &DVector<f64>| kcut.inner.eval(x, z, &kcut.quad).unwrap();
            let n1 = dirichlet_check(&re, &domain, &samples, interior, tol);
            let n2 = dirichlet_check(&kre, &domain, &samples, interior, tol);
            Ok([
                exact_row(
                    "dirichlet-paired",
                    i,
                    if d1.passed == d2.passed && d1.passed {
                        0.0
                    } else {
                        1.0
                    },
                    0.0,
                ),
                exact_row(
                    "dirichlet-negative-control",
                    i,
                    if !n1.passed && !n2.passed { 0.0 } else { 1.0 },
                    0.0,
                ),
            ])
        })
        .collect();
    let mut rows = Vec::new();
    for pair in row_pairs {
        rows.extend(pair?);
    }
    Ok(vec![CheckReport::from_rows("dirichlet-paired", 0.0, rows)
        .with_note(
            "10-function cutoff corpus, kappa-paired verdicts",
        )])
}

fn suite_z_neumann(cfg: &RunConfig) -> anyhow::Result<Vec<CheckReport>> {
    let (source, target) = build_pair(cfg)?;
    let basis = PoleBasis::constant_default(&source)?;
    let quad = cfg.quad_spec()?;
    let op = KappaOperator::new(
        Arc::clone(&source),
        Arc::clone(&target),
        Arc::clone(&basis),
        quad.clone(),
    )?;
    let domain = DomainShape::SphereBall { r_x: 1.0, r_z: 0.8 };
    let samples = domain.boundary_samples(source.k, source.l, 6, cfg.seed, 0.05);
    let h = cfg.tol("stencil-step");
    let tol = cfg.tol("z-neumann");
    // squared-cutoff corpus: paired verdicts
    let corpus = cutoff_corpus(cfg, &source, &basis, &domain, 2)?;
    let mut rows = Vec::new();
    for (i, cut) in corpus.iter().enumerate() {
        let kcut = cut.apply_kappa(&op)?;
        let interior = {
            let x = DVector::from_element(source.k, 0.25);
            let z = DVector::from_element(source.l, 0.1);
            cut.eval(&x, &z)?.norm().max(1e-6)
        };
        let ce = |x: &DVector<f64>, z: &DVector<f64>| cut.eval(x, z).unwrap();
        let kce = |x: &DVector<f64>, z: &DVector<f64>| kcut.eval(x, z).unwrap();
        let r1 = intertwine::z_neumann_check(&ce, &samples, interior, tol, h);
        let r2 = intertwine::z_neumann_check(&kce, &samples, interior, tol, h);
        rows.push(exact_row(
            "z-neumann-paired",
            i,
            if r1.passed == r2.passed && r1.passed {
                0.0
            } else {
                1.0
            },
            0.0,
        ));
    }
    let paired = CheckReport::from_rows("z-neumann-paired", 0.0, rows);
    // reduction identity with the prefactor oracle
    let f = one_pole_test_function(&source, &basis, 1, 0)?;
    let id_samples = sample_points(source.k, source.l, cfg.samples.min(10), cfg.seed, 0.8, 0.9);
    let (chosen, rep) =
        identity_check_z_neumann(&f, &id_samples, &quad, cfg.tol("z-neumann-identity"), h)?;
    if chosen != "-1/|Z|" {
        bail!("prefactor oracle selected {chosen}, conventions record -1/|Z|");
    }
    Ok(vec![paired, rep])
}

fn suite_neumann(cfg: &RunConfig) -> anyhow::Result<Vec<CheckReport>> {
    let source = Arc::new(cfg.group.build()?);
    let domain = DomainShape::BallType {
        r_x: 1.0,
        radius: RadiusFn {
            coeffs: vec![0.9, 0.0, -0.25],
        },
    };
    let samples = domain.boundary_samples(source.k, source.l, 50, cfg.seed, 0.05);
    // the defining function is closed-form, so the normal tolerates a much
    // finer stencil than the quadrature-backed checks
    let h = 1e-4;
    let tol = cfg.tol("neumann-span");
    let f = |x: &DVector<f64>, z: &DVector<f64>| Complex64::new((x[0] + z[0]).sin(), x[1]);
    let rep = intertwine::neumann_check(&source, &f, &domain, &samples, tol, h)?;
    // cylinder: no X_u component in the normal
    let cyl = DomainShape::BallType {
        r_x: 1.0,
        radius: RadiusFn::constant(0.8),
    };
    let cyl_samples = cyl.boundary_samples(source.k, source.l, 10, cfg.seed + 1, 0.1);
    let mut rows = Vec::new();
    for (i, (x, z)) in cyl_samples.iter().enumerate() {
        let n = neumann_normal(&source, &cyl, x, z, h, false)?
            .ok_or_else(|| anyhow!("degenerate sample"))?;
        rows.push(exact_row("neumann-cylinder-radial", i, n.a.abs(), 1e-6));
    }
    let cyl_rep = CheckReport::from_rows("neumann-cylinder-radial", 1e-6, rows)
        .with_note("|Z| = const: the normal keeps a J_Z(X) component from the frame bracket");
    Ok(vec![rep, cyl_rep])
}

fn suite_boundary(cfg: &RunConfig) -> anyhow::Result<Vec<CheckReport>> {
    let (source, target) = build_pair(cfg)?;
    let basis = PoleBasis::constant_default(&source)?;
    let quad = cfg.quad_spec()?;
    let op = KappaOperator::new(
        Arc::clone(&source),
        Arc::clone(&target),
        Arc::clone(&basis),
        quad.clone(),
    )?;
    let (r_x, r_z) = (1.0, 0.9);
    let vs = constant_vectors(&basis)?;
    let h = cfg.tol("stencil-step");
    let f = build_z_neumann_one_pole(
        Arc::clone(&source),
        Arc::clone(&basis),
        &vs[0],
        1,
        0,
        r_z,
        &[0.5, 0.8, 1.25],
        &quad,
        cfg.seed,
    )
    .context("Z-Neumann mixture construction")?;
    let lap = boundary_laplacian_check(
        &op,
        &f,
        r_x,
        r_z,
        6,
        cfg.seed,
        cfg.tol("boundary-laplacian"),
        h,
    )?;
    // second-radial identity with the constant oracle
    let g = one_pole_test_function(&source, &basis, 1, 0)?;
    let id_samples = sample_points(source.k, source.l, cfg.samples.min(8), cfg.seed, 0.8, 0.9);
    let (chosen, rep) =
        identity_check_second_radial(&g, &id_samples, &quad, cfg.tol("second-radial"), h)?;
    if chosen != "l(l+1)" {
        bail!("second-radial oracle selected {chosen}, conventions record l(l+1)");
    }
    Ok(vec![lap, rep])
}
