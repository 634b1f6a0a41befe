//! The intertwining operator kappa between sigma-equivalent spaces:
//! re-reading a twisted Z-Fourier specification through the deformed
//! endomorphisms, and the Laplacian-intertwining verification.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::algebra::EndomorphismSpace;
use crate::funcspace::{PoleBasis, TwistedFunction};
use crate::operators;
use crate::quad::QuadSpec;
use crate::report::{complex_pair, CheckReport, CheckRow};
use crate::{CoreError, Result};

/// kappa between a source space and its sigma-deformation (or a perturbed
/// pair built from the same module), over a shared pole basis.
pub struct KappaOperator {
    pub source: Arc<EndomorphismSpace>,
    pub target: Arc<EndomorphismSpace>,
    pub basis: Arc<PoleBasis>,
    pub quad: QuadSpec,
}

impl KappaOperator {
    pub fn new(
        source: Arc<EndomorphismSpace>,
        target: Arc<EndomorphismSpace>,
        basis: Arc<PoleBasis>,
        quad: QuadSpec,
    ) -> Result<Self> {
        if source.k != target.k || source.l != target.l {
            return Err(CoreError::InvalidComparison(format!(
                "spaces have different shapes: ({}, {}) vs ({}, {})",
                source.k, source.l, target.k, target.l
            )));
        }
        // J'_V^2 = J_V^2 on sampled directions
        let mut rng = ChaCha8Rng::seed_from_u64(0x4a5f);
        for _ in 0..20 {
            let v = DVector::from_fn(source.l, |_, _| rng.gen_range(-1.0..1.0));
            let js = source.j_of(&v)?;
            let jt = target.j_of(&v)?;
            let res = (&js * &js - &jt * &jt).amax();
            if res > 1e-8 {
                return Err(CoreError::InvalidComparison(format!(
                    "J'^2 != J^2 (residual {res:.3e}); not a sigma-equivalent pair"
                )));
            }
        }
        // the shared basis must be usable on both sides
        let mut v0 = DVector::zeros(source.l);
        v0[0] = 1.0;
        basis.at(&source, &v0)?;
        basis.at(&target, &v0)?;
        Ok(KappaOperator {
            source,
            target,
            basis,
            quad,
        })
    }

    /// Identical specification re-bound to the target space.
    pub fn apply(&self, f: &TwistedFunction) -> Result<TwistedFunction> {
        if !Arc::ptr_eq(&f.basis, &self.basis) {
            return Err(CoreError::BasisMismatch);
        }
        if !Arc::ptr_eq(&f.space, &self.source) {
            return Err(CoreError::BasisMismatch);
        }
        Ok(f.rebind(Arc::clone(&self.target)))
    }
}

/// Free-function form of [`KappaOperator::apply`].
pub fn apply_kappa(op: &KappaOperator, f: &TwistedFunction) -> Result<TwistedFunction> {
    op.apply(f)
}

/// Verify `Delta'(kappa f) = kappa(Delta f)` at sample points.
///
/// The left side applies the full Laplacian by finite differences to the
/// quadrature evaluation of `kappa f`; the right side re-binds the algebraic
/// image `Delta f` (X-lowering + middle profile transform + M profile
/// transform) and evaluates it by quadrature. The two routes share nothing
/// past the integrand algebra.
pub fn verify_intertwines_laplacian(
    op: &KappaOperator,
    f: &TwistedFunction,
    samples: &[(DVector<f64>, DVector<f64>)],
    tol: f64,
    h: f64,
) -> Result<CheckReport> {
    let kf = op.apply(f)?;
    let delta_f = f.full_laplacian_image()?;
    let kappa_delta_f = op.apply(&delta_f)?;
    let quad = &op.quad;

    let mut pairs: Vec<(Complex64, Complex64)> = Vec::with_capacity(samples.len());
    let mut scale: f64 = 1e-12;
    for (x, z) in samples {
        let kf_eval = |xx: &DVector<f64>, zz: &DVector<f64>| kf.eval(xx, zz, quad).unwrap();
        let lhs = operators::full_laplacian(&op.target, &kf_eval, x, z, h)?;
        let rhs = kappa_delta_f.eval(x, z, quad)?;
        scale = scale
            .max(lhs.norm())
            .max(rhs.norm())
            .max(kf.eval(x, z, quad)?.norm());
        pairs.push((lhs, rhs));
    }
    let rows = pairs
        .iter()
        .enumerate()
        .map(|(i, (lhs, rhs))| {
            let residual = (lhs - rhs).norm() / scale;
            CheckRow {
                check: "intertwine-laplacian".to_string(),
                sample: i,
                lhs: complex_pair(*lhs),
                rhs: complex_pair(*rhs),
                residual,
                verdict: residual <= tol,
            }
        })
        .collect();
    Ok(CheckReport::from_rows("intertwine-laplacian", tol, rows))
}

/// Verify the two profile-transform identities on one space:
/// `M F(phi) = F((q-p)|V| phi)` and `Delta_Z F(phi) = F(-|V|^2 phi)`.
pub fn verify_mf_and_delta_zf(
    space: &Arc<EndomorphismSpace>,
    f: &TwistedFunction,
    samples: &[(DVector<f64>, DVector<f64>)],
    quad: &QuadSpec,
    tol: f64,
    h: f64,
) -> Result<(CheckReport, CheckReport)> {
    let m_image = f.m_image()?;
    let dz_image = f.delta_z_image();
    let mut m_pairs = Vec::new();
    let mut dz_pairs = Vec::new();
    let mut fscale: f64 = 1e-12;
    for (x, z) in samples {
        let f_eval = |xx: &DVector<f64>, zz: &DVector<f64>| f.eval(xx, zz, quad).unwrap();
        let m_lhs = operators::m_operator(space, &f_eval, x, z, h)?;
        let m_rhs = m_image.eval(x, z, quad)?;
        m_pairs.push((m_lhs, m_rhs));
        let dz_lhs = operators::delta_z(&f_eval, x, z, h);
        let dz_rhs = dz_image.eval(x, z, quad)?;
        dz_pairs.push((dz_lhs, dz_rhs));
        fscale = fscale.max(f.eval(x, z, quad)?.norm());
    }
    let build = |name: &str, pairs: Vec<(Complex64, Complex64)>| {
        let scale = pairs
            .iter()
            .map(|(a, b)| a.norm().max(b.norm()))
            .fold(0.0f64, f64::max)
            .max(fscale);
        let rows = pairs
            .iter()
            .enumerate()
            .map(|(i, (lhs, rhs))| {
                let residual = (lhs - rhs).norm() / scale;
                CheckRow {
                    check: name.to_string(),
                    sample: i,
                    lhs: complex_pair(*lhs),
                    rhs: complex_pair(*rhs),
                    residual,
                    verdict: residual <= tol,
                }
            })
            .collect();
        CheckReport::from_rows(name, tol, rows)
    };
    Ok((
        build("identity-MF", m_pairs),
        build("identity-DeltaZF", dz_pairs),
    ))
}

/// Deterministic sample points away from the axes, for the verification
/// suites.
pub fn sample_points(
    k: usize,
    l: usize,
    count: usize,
    seed: u64,
    x_scale: f64,
    z_scale: f64,
) -> Vec<(DVector<f64>, DVector<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let x = DVector::from_fn(k, |_, _| rng.gen_range(-1.0..1.0)) * x_scale;
            let z = DVector::from_fn(l, |_, _| rng.gen_range(-1.0..1.0)) * z_scale;
            (x, z)
        })
        .collect()
}
