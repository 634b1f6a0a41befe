//! Numerical independence tests: Gram-rank additivity of the even-J and
//! odd-J families sampled on circles of an X-sphere at boundary Z values.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use super::parity::{parity_decompose, ParityPart};
use crate::algebra::EndomorphismSpace;
use crate::funcspace::{make_one_pole, GeneratorProfile, PoleBasis};
use crate::quad::QuadSpec;
use crate::{CoreError, Result};

#[derive(Clone, Debug)]
pub struct IndependenceConfig {
    /// total degree `n = p + q` of the sampled monomials
    pub degree: u8,
    pub num_poles: usize,
    pub num_circles: usize,
    pub points_per_circle: usize,
    /// relative singular-value threshold for the numerical rank
    pub threshold: f64,
    pub seed: u64,
    pub r_x: f64,
    pub z_boundary_norm: f64,
    pub quad: QuadSpec,
    /// condition cap: resample if the sampled value matrix is worse
    pub condition_cap: f64,
}

impl IndependenceConfig {
    /// Rank decisions tolerate a lighter quadrature than the identity
    /// checks; singular-value gaps sit orders of magnitude above the noise.
    pub fn rank_quad() -> QuadSpec {
        QuadSpec {
            n_radial: 16,
            n_polar: 12,
            n_azimuth: 24,
            tail_sigmas: 10.0,
        }
    }

    /// Family and sampling sizes are balanced: restricted to a circle a
    /// degree-n function spans at most 2n + 1 trigonometric dimensions, so
    /// the circle count scales with the sampled family size.
    pub fn desk_scale(degree: u8, quad: QuadSpec) -> Self {
        IndependenceConfig {
            degree,
            num_poles: 3,
            num_circles: 8,
            points_per_circle: 12,
            threshold: 1e-8,
            seed: 2024,
            r_x: 1.0,
            z_boundary_norm: 0.8,
            quad,
            condition_cap: 1e12,
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct IndependenceVerdict {
    pub rank_even: usize,
    pub rank_odd: usize,
    pub rank_union: usize,
    pub additivity: bool,
    pub singular_threshold: f64,
    pub resamples: usize,
}

fn numerical_rank(a: &DMatrix<f64>, threshold: f64) -> (usize, f64) {
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return (0, 1.0);
    }
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > threshold * smax)
        .count();
    let smin = svd.singular_values.min();
    (rank, smax / smin.max(f64::MIN_POSITIVE))
}

/// Sample the even-J and odd-J families of one-pole functions of total
/// degree `n` at circle points on `S_{R_X}` with `|Z|` on the boundary, and
/// test Gram-rank additivity of the union.
pub fn independence_rank_test(
    space: &Arc<EndomorphismSpace>,
    cfg: &IndependenceConfig,
) -> Result<IndependenceVerdict> {
    if cfg.degree > 6 {
        return Err(CoreError::InvalidArgument(
            "independence test runs at desk scale, degree <= 6".to_string(),
        ));
    }
    let basis = PoleBasis::constant_default(space)?;
    let mut seed = cfg.seed;
    let mut resamples = 0usize;
    loop {
        let (even, odd, points) = build_families(space, &basis, cfg, seed)?;
        let eval_matrix = |fam: &[ParityPart]| -> Result<DMatrix<f64>> {
            // rows: 2 per function (re and im), cols: points
            let mut m = DMatrix::<f64>::zeros(2 * fam.len(), points.len());
            for (r, f) in fam.iter().enumerate() {
                for (c, (x, z)) in points.iter().enumerate() {
                    let v = f.eval(x, z, &cfg.quad)?;
                    m[(2 * r, c)] = v.re;
                    m[(2 * r + 1, c)] = v.im;
                }
            }
            Ok(m)
        };
        let me = eval_matrix(&even)?;
        let mo = eval_matrix(&odd)?;
        let mut union = DMatrix::<f64>::zeros(me.nrows() + mo.nrows(), points.len());
        union
            .view_mut((0, 0), (me.nrows(), points.len()))
            .copy_from(&me);
        union
            .view_mut((me.nrows(), 0), (mo.nrows(), points.len()))
            .copy_from(&mo);
        let (rank_even, _) = numerical_rank(&me, cfg.threshold);
        let (rank_odd, _) = numerical_rank(&mo, cfg.threshold);
        let (rank_union, cond) = numerical_rank(&union, cfg.threshold);
        if cond > cfg.condition_cap && resamples < 3 {
            resamples += 1;
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            continue;
        }
        return Ok(IndependenceVerdict {
            rank_even,
            rank_odd,
            rank_union,
            additivity: rank_union == rank_even + rank_odd,
            singular_threshold: cfg.threshold,
            resamples,
        });
    }
}

/// Negative control: plant one even-family function into the odd family;
/// additivity must fail.
pub fn independence_negative_control(
    space: &Arc<EndomorphismSpace>,
    cfg: &IndependenceConfig,
) -> Result<bool> {
    let basis = PoleBasis::constant_default(space)?;
    let (even, mut odd, points) = build_families(space, &basis, cfg, cfg.seed)?;
    odd.push(even[0].clone());
    let eval_matrix = |fam: &[ParityPart]| -> Result<DMatrix<f64>> {
        let mut m = DMatrix::<f64>::zeros(2 * fam.len(), points.len());
        for (r, f) in fam.iter().enumerate() {
            for (c, (x, z)) in points.iter().enumerate() {
                let v = f.eval(x, z, &cfg.quad)?;
                m[(2 * r, c)] = v.re;
                m[(2 * r + 1, c)] = v.im;
            }
        }
        Ok(m)
    };
    let me = eval_matrix(&even)?;
    let mo = eval_matrix(&odd)?;
    let mut union = DMatrix::<f64>::zeros(me.nrows() + mo.nrows(), points.len());
    union
        .view_mut((0, 0), (me.nrows(), points.len()))
        .copy_from(&me);
    union
        .view_mut((me.nrows(), 0), (mo.nrows(), points.len()))
        .copy_from(&mo);
    let (re, _) = numerical_rank(&me, cfg.threshold);
    let (ro, _) = numerical_rank(&mo, cfg.threshold);
    let (ru, _) = numerical_rank(&union, cfg.threshold);
    // the planted duplicate makes the union rank strictly smaller
    Ok(ru < re + ro)
}

#[allow(clippy::type_complexity)]
fn build_families(
    space: &Arc<EndomorphismSpace>,
    basis: &Arc<PoleBasis>,
    cfg: &IndependenceConfig,
    seed: u64,
) -> Result<(
    Vec<ParityPart>,
    Vec<ParityPart>,
    Vec<(DVector<f64>, DVector<f64>)>,
)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = space.k;
    let l = space.l;
    let cb_vectors = match &**basis {
        PoleBasis::Constant(c) => c.vectors.clone(),
        _ => unreachable!(),
    };
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for _ in 0..cfg.num_poles {
        // random pole in the real span of the basis
        let mut pole = DVector::<f64>::zeros(k);
        for q in &cb_vectors {
            pole += q * rng.gen_range(-1.0..1.0f64);
        }
        for p in 0..=cfg.degree {
            let q = cfg.degree - p;
            let f = make_one_pole(
                Arc::clone(space),
                Arc::clone(basis),
                &pole,
                p,
                q,
                GeneratorProfile::standard_gaussian(),
            )?;
            let parts = parity_decompose(&f)?;
            let [ee, eo, oe, oo] = parts;
            for part in [ee, eo] {
                if !part.is_empty() {
                    even.push(part);
                }
            }
            for part in [oe, oo] {
                if !part.is_empty() {
                    odd.push(part);
                }
            }
        }
    }
    // circle points: random 2-planes through the origin intersected with
    // the X-sphere, paired with a fixed boundary Z value per circle
    let mut points = Vec::new();
    for _ in 0..cfg.num_circles {
        let u = random_unit(&mut rng, k);
        let mut v = random_unit(&mut rng, k);
        v -= &u * u.dot(&v);
        let v = v.normalize();
        let z = random_unit(&mut rng, l) * cfg.z_boundary_norm;
        for j in 0..cfg.points_per_circle {
            let alpha =
                2.0 * std::f64::consts::PI * (j as f64 + 0.37) / cfg.points_per_circle as f64;
            let x = (&u * alpha.cos() + &v * alpha.sin()) * cfg.r_x;
            points.push((x, z.clone()));
        }
    }
    Ok((even, odd, points))
}

fn random_unit(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        if v.norm() > 1e-3 {
            return v.normalize();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{h_type_space, perturbed_h_type_space};

    fn small_cfg(degree: u8) -> IndependenceConfig {
        // trimmed-down quadrature keeps the unit test quick
        let quad = QuadSpec {
            n_radial: 16,
            n_polar: 10,
            n_azimuth: 20,
            tail_sigmas: 10.0,
        };
        IndependenceConfig {
            num_poles: 2,
            num_circles: 5,
            points_per_circle: 12,
            ..IndependenceConfig::desk_scale(degree, quad)
        }
    }

    #[test]
    fn rank_additivity_h20_degree_two() {
        let space = Arc::new(h_type_space(3, 2, 0).unwrap());
        let v = independence_rank_test(&space, &small_cfg(2)).unwrap();
        assert!(v.additivity, "{v:?}");
        assert!(v.rank_even > 0 && v.rank_odd > 0);
    }

    #[test]
    fn negative_control_fails_as_designed() {
        let space = Arc::new(h_type_space(3, 1, 1).unwrap());
        assert!(independence_negative_control(&space, &small_cfg(2)).unwrap());
    }

    #[test]
    fn perturbed_space_keeps_additivity() {
        let space = Arc::new(perturbed_h_type_space(3, 1, 1, 0.02, 42).unwrap());
        let v = independence_rank_test(&space, &small_cfg(2)).unwrap();
        assert!(v.additivity, "{v:?}");
    }
}
