//! Deterministic quadrature rules: Gauss-Legendre and Gauss-Hermite on the
//! line, product rules on spheres and hemispheres.
//!
//! Nodes come from the Golub-Welsch eigenproblem of the Jacobi matrix, so a
//! fixed order always produces bit-identical rules. Spherical rules use
//! Gauss-Legendre in the polar cosine crossed with uniform azimuth nodes for
//! `l = 3`, uniform angles for `l = 2`, and a recursive polar tensor rule for
//! higher `l`.

use nalgebra::{DMatrix, DVector};

use crate::{CoreError, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    golub_welsch(
        n,
        |i| {
            let k = i as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        },
        2.0,
    )
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_ab(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (t, w) = gauss_legendre(n);
    let c = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    (
        t.iter().map(|x| m + c * x).collect(),
        w.iter().map(|x| c * x).collect(),
    )
}

/// Gauss-Hermite nodes and weights for the weight `exp(-x^2)` on the line.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    golub_welsch(n, |i| (i as f64 / 2.0).sqrt(), std::f64::consts::PI.sqrt())
}

/// Symmetric-tridiagonal Golub-Welsch: off-diagonal entries `beta(i)`,
/// zeroth moment `mu0`.
fn golub_welsch(n: usize, beta: impl Fn(usize) -> f64, mu0: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature rule needs at least one node");
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let b = beta(i);
        j[(i - 1, i)] = b;
        j[(i, i - 1)] = b;
    }
    let eig = j.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|c| {
            let v0 = eig.eigenvectors[(0, c)];
            (eig.eigenvalues[c], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    (
        pairs.iter().map(|p| p.0).collect(),
        pairs.iter().map(|p| p.1).collect(),
    )
}

/// Quadrature nodes on a sphere or hemisphere, paired with weights for the
/// surface measure.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub nodes: Vec<DVector<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(&DVector<f64>) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(n, w)| w * f(n))
            .sum()
    }
}

/// Full-sphere rule on `S^{l-1}`.
///
/// `n_polar` controls Gauss-Legendre resolution in each polar angle,
/// `n_azimuth` the uniform azimuth count (`l = 1` ignores both).
pub fn sphere_rule(l: usize, n_polar: usize, n_azimuth: usize) -> Result<SphereRule> {
    if l == 0 {
        return Err(CoreError::InvalidQuadrature("l = 0 sphere".to_string()));
    }
    if l > 1 && (n_polar == 0 || n_azimuth == 0) {
        return Err(CoreError::InvalidQuadrature(
            "sphere rule with zero nodes".to_string(),
        ));
    }
    Ok(match l {
        1 => SphereRule {
            nodes: vec![DVector::from_vec(vec![1.0]), DVector::from_vec(vec![-1.0])],
            weights: vec![1.0, 1.0],
        },
        2 => {
            let mut nodes = Vec::with_capacity(n_azimuth);
            let mut weights = Vec::with_capacity(n_azimuth);
            let w = 2.0 * std::f64::consts::PI / n_azimuth as f64;
            for j in 0..n_azimuth {
                let phi = w * (j as f64 + 0.5);
                nodes.push(DVector::from_vec(vec![phi.cos(), phi.sin()]));
                weights.push(w);
            }
            SphereRule { nodes, weights }
        }
        3 => {
            let (ts, ws) = gauss_legendre(n_polar);
            let dphi = 2.0 * std::f64::consts::PI / n_azimuth as f64;
            let mut nodes = Vec::with_capacity(n_polar * n_azimuth);
            let mut weights = Vec::with_capacity(n_polar * n_azimuth);
            for (t, wt) in ts.iter().zip(&ws) {
                let s = (1.0 - t * t).max(0.0).sqrt();
                for j in 0..n_azimuth {
                    let phi = dphi * (j as f64 + 0.5);
                    nodes.push(DVector::from_vec(vec![s * phi.cos(), s * phi.sin(), *t]));
                    weights.push(wt * dphi);
                }
            }
            SphereRule { nodes, weights }
        }
        _ => {
            // polar angle against S^{l-2}; the sin^(l-2) density is analytic
            // in the angle, so Gauss-Legendre in psi converges spectrally
            let inner = sphere_rule(l - 1, n_polar, n_azimuth)?;
            let (psis, ws) = gauss_legendre_ab(n_polar, 0.0, std::f64::consts::PI);
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for (psi, wt) in psis.iter().zip(&ws) {
                let (s, t) = psi.sin_cos();
                let dens = s.powi(l as i32 - 2);
                for (omega, wo) in inner.nodes.iter().zip(&inner.weights) {
                    let mut v = DVector::zeros(l);
                    v[0] = t;
                    for i in 0..l - 1 {
                        v[i + 1] = s * omega[i];
                    }
                    nodes.push(v);
                    weights.push(wt * dens * wo);
                }
            }
            SphereRule { nodes, weights }
        }
    })
}

/// Orthonormal frame whose first column is `pole`.
pub fn frame_with_pole(pole: &DVector<f64>) -> DMatrix<f64> {
    let l = pole.len();
    let mut cols: Vec<DVector<f64>> = vec![pole.normalize()];
    for i in 0..l {
        if cols.len() == l {
            break;
        }
        let mut v = DVector::zeros(l);
        v[i] = 1.0;
        for c in &cols {
            let d = c.dot(&v);
            v -= c * d;
        }
        let n = v.norm();
        if n > 1e-8 {
            cols.push(v / n);
        }
    }
    DMatrix::from_columns(&cols)
}

/// Hemisphere rule on `{theta in S^{l-1} : <theta, pole> >= 0}`.
pub fn hemisphere_rule(
    l: usize,
    pole: &DVector<f64>,
    n_polar: usize,
    n_azimuth: usize,
) -> Result<SphereRule> {
    if l < 2 {
        return Err(CoreError::InvalidQuadrature(
            "hemisphere rule needs l >= 2".to_string(),
        ));
    }
    if pole.norm() == 0.0 {
        return Err(CoreError::InvalidQuadrature(
            "hemisphere rule needs a nonzero pole".to_string(),
        ));
    }
    let frame = frame_with_pole(pole);
    Ok(match l {
        2 => {
            // angle from the pole in (-pi/2, pi/2)
            let (ps, ws) = gauss_legendre_ab(
                n_azimuth.max(n_polar),
                -std::f64::consts::FRAC_PI_2,
                std::f64::consts::FRAC_PI_2,
            );
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for (p, w) in ps.iter().zip(&ws) {
                let v = frame.column(0) * p.cos() + frame.column(1) * p.sin();
                nodes.push(v.clone_owned());
                weights.push(*w);
            }
            SphereRule { nodes, weights }
        }
        3 => {
            // d theta = dt d phi with t = <theta, pole> in [0, 1]
            let (ts, ws) = gauss_legendre_ab(n_polar, 0.0, 1.0);
            let dphi = 2.0 * std::f64::consts::PI / n_azimuth as f64;
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for (t, wt) in ts.iter().zip(&ws) {
                let s = (1.0 - t * t).max(0.0).sqrt();
                for j in 0..n_azimuth {
                    let phi = dphi * (j as f64 + 0.5);
                    let v = frame.column(0) * *t
                        + frame.column(1) * (s * phi.cos())
                        + frame.column(2) * (s * phi.sin());
                    nodes.push(v.clone_owned());
                    weights.push(wt * dphi);
                }
            }
            SphereRule { nodes, weights }
        }
        _ => {
            let inner = sphere_rule(l - 1, n_polar, n_azimuth)?;
            let (psis, ws) = gauss_legendre_ab(n_polar, 0.0, std::f64::consts::FRAC_PI_2);
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for (psi, wt) in psis.iter().zip(&ws) {
                let (s, t) = psi.sin_cos();
                let dens = s.powi(l as i32 - 2);
                for (omega, wo) in inner.nodes.iter().zip(&inner.weights) {
                    let mut v = frame.column(0) * t;
                    for i in 0..l - 1 {
                        v += frame.column(i + 1) * (s * omega[i]);
                    }
                    nodes.push(v);
                    weights.push(wt * dens * wo);
                }
            }
            SphereRule { nodes, weights }
        }
    })
}

/// Named quadrature preset for the twisted Z-Fourier integrals.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadSpec {
    /// Gauss-Legendre nodes on the radial interval.
    pub n_radial: usize,
    /// polar resolution of the sphere rule
    pub n_polar: usize,
    /// azimuth resolution of the sphere rule
    pub n_azimuth: usize,
    /// radial truncation in units of the profile's Gaussian width
    pub tail_sigmas: f64,
}

impl QuadSpec {
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "l1-default" => Ok(Self {
                n_radial: 48,
                n_polar: 1,
                n_azimuth: 1,
                tail_sigmas: 12.0,
            }),
            "l2-default" => Ok(Self {
                n_radial: 32,
                n_polar: 24,
                n_azimuth: 48,
                tail_sigmas: 12.0,
            }),
            "l3-default" => Ok(Self {
                n_radial: 28,
                n_polar: 22,
                n_azimuth: 44,
                tail_sigmas: 12.0,
            }),
            "l3-fine" => Ok(Self {
                n_radial: 56,
                n_polar: 44,
                n_azimuth: 88,
                tail_sigmas: 14.0,
            }),
            other => Err(CoreError::InvalidQuadrature(format!(
                "unknown quadrature preset '{other}'"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_radial == 0 || self.n_polar == 0 || self.n_azimuth == 0 {
            return Err(CoreError::InvalidQuadrature(
                "quadrature spec with zero nodes".to_string(),
            ));
        }
        Ok(())
    }

    /// Same rule with doubled node counts, for self-convergence checks.
    pub fn refined(&self) -> Self {
        Self {
            n_radial: self.n_radial * 2,
            n_polar: self.n_polar * 2,
            n_azimuth: self.n_azimuth * 2,
            tail_sigmas: self.tail_sigmas,
        }
    }
}
