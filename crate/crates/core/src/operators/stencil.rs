//! Centered finite-difference applications of the group differential
//! operators to numerically evaluable functions of `(X, Z)`.
//!
//! All stencils are 2nd order with error `O(h^2)`. The default step
//! balances truncation against quadrature noise at the tolerances the
//! verification suites assert.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::algebra::EndomorphismSpace;
use crate::Result;

/// Anything evaluable at a point of the group.
pub trait Evaluable {
    fn eval_at(&self, x: &DVector<f64>, z: &DVector<f64>) -> Complex64;
}

impl<F: Fn(&DVector<f64>, &DVector<f64>) -> Complex64> Evaluable for F {
    fn eval_at(&self, x: &DVector<f64>, z: &DVector<f64>) -> Complex64 {
        self(x, z)
    }
}

/// Finite-difference configuration.
#[derive(Clone, Copy, Debug)]
pub struct StencilSpec {
    pub h: f64,
}

impl Default for StencilSpec {
    fn default() -> Self {
        StencilSpec { h: 1e-3 }
    }
}

fn shifted(v: &DVector<f64>, i: usize, dh: f64) -> DVector<f64> {
    let mut w = v.clone();
    w[i] += dh;
    w
}

/// d/dx_i by centered difference.
pub fn partial_x(
    f: &dyn Evaluable,
    x: &DVector<f64>,
    z: &DVector<f64>,
    i: usize,
    h: f64,
) -> Complex64 {
    (f.eval_at(&shifted(x, i, h), z) - f.eval_at(&shifted(x, i, -h), z)) / (2.0 * h)
}

/// d/dz_a by centered difference.
pub fn partial_z(
    f: &dyn Evaluable,
    x: &DVector<f64>,
    z: &DVector<f64>,
    a: usize,
    h: f64,
) -> Complex64 {
    (f.eval_at(x, &shifted(z, a, h)) - f.eval_at(x, &shifted(z, a, -h))) / (2.0 * h)
}

/// Euclidean X-Laplacian.
pub fn delta_x(f: &dyn Evaluable, x: &DVector<f64>, z: &DVector<f64>, h: f64) -> Complex64 {
    let center = f.eval_at(x, z) * 2.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..x.len() {
        acc += f.eval_at(&shifted(x, i, h), z) + f.eval_at(&shifted(x, i, -h), z) - center;
    }
    acc / (h * h)
}

/// Euclidean Z-Laplacian.
pub fn delta_z(f: &dyn Evaluable, x: &DVector<f64>, z: &DVector<f64>, h: f64) -> Complex64 {
    let center = f.eval_at(x, z) * 2.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..z.len() {
        acc += f.eval_at(x, &shifted(z, a, h)) + f.eval_at(x, &shifted(z, a, -h)) - center;
    }
    acc / (h * h)
}

/// Mixed `d^2/dz_a dz_b` (cross stencil for `a != b`).
pub fn partial2_z(
    f: &dyn Evaluable,
    x: &DVector<f64>,
    z: &DVector<f64>,
    a: usize,
    b: usize,
    h: f64,
) -> Complex64 {
    if a == b {
        let c = f.eval_at(x, z) * 2.0;
        (f.eval_at(x, &shifted(z, a, h)) + f.eval_at(x, &shifted(z, a, -h)) - c) / (h * h)
    } else {
        let pp = f.eval_at(x, &shifted(&shifted(z, a, h), b, h));
        let pm = f.eval_at(x, &shifted(&shifted(z, a, h), b, -h));
        let mp = f.eval_at(x, &shifted(&shifted(z, a, -h), b, h));
        let mm = f.eval_at(x, &shifted(&shifted(z, a, -h), b, -h));
        (pp - pm - mp + mm) / (4.0 * h * h)
    }
}

/// Directional derivative along the vector field `X -> J_V(X)`, evaluated
/// at `(X, Z)`: `d/dt f(X + t J_V X)|_0`.
pub fn d_v(
    space: &EndomorphismSpace,
    f: &dyn Evaluable,
    v: &DVector<f64>,
    x: &DVector<f64>,
    z: &DVector<f64>,
    h: f64,
) -> Result<Complex64> {
    if v.norm() == 0.0 {
        return Err(crate::CoreError::InvalidArgument(
            "D_V needs V != 0".to_string(),
        ));
    }
    let w = space.j_of(v)? * x;
    Ok((f.eval_at(&(x + &w * h), z) - f.eval_at(&(x - &w * h), z)) / (2.0 * h))
}

/// Compound angular momentum `M = sum_a d/dz_a D_a` by nested centered
/// differences.
pub fn m_operator(
    space: &EndomorphismSpace,
    f: &dyn Evaluable,
    x: &DVector<f64>,
    z: &DVector<f64>,
    h: f64,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for alpha in 0..space.l {
        let w = &space.generators()[alpha] * x;
        let g = |zz: &DVector<f64>| -> Complex64 {
            (f.eval_at(&(x + &w * h), zz) - f.eval_at(&(x - &w * h), zz)) / (2.0 * h)
        };
        acc += (g(&shifted(z, alpha, h)) - g(&shifted(z, alpha, -h))) / (2.0 * h);
    }
    Ok(acc)
}

/// The full Laplacian at `(X, Z)`:
/// `Delta_X + (1 + |X|^2/4) Delta_Z + M` on Cliffordian spaces, with the
/// middle term replaced by `Delta_Z + (1/4) sum <J_a X, J_b X> d2/dz_a dz_b`
/// in general.
pub fn full_laplacian(
    space: &EndomorphismSpace,
    f: &dyn Evaluable,
    x: &DVector<f64>,
    z: &DVector<f64>,
    h: f64,
) -> Result<Complex64> {
    let dx = delta_x(f, x, z, h);
    let m = m_operator(space, f, x, z, h)?;
    let middle = if space.is_cliffordian() {
        delta_z(f, x, z, h) * (1.0 + 0.25 * x.norm_squared())
    } else {
        let mut acc = delta_z(f, x, z, h);
        let jx: Vec<DVector<f64>> = space.generators().iter().map(|g| g * x).collect();
        for a in 0..space.l {
            for b in 0..space.l {
                let c = 0.25 * jx[a].dot(&jx[b]);
                if c.abs() > 1e-15 {
                    acc += partial2_z(f, x, z, a, b, h) * c;
                }
            }
        }
        acc
    };
    Ok(dx + middle + m)
}

/// X-radial derivative `d/d|X|` (along `X_u`).
pub fn radial_x(f: &dyn Evaluable, x: &DVector<f64>, z: &DVector<f64>, h: f64) -> Complex64 {
    let xu = x.normalize();
    (f.eval_at(&(x + &xu * h), z) - f.eval_at(&(x - &xu * h), z)) / (2.0 * h)
}

/// Second X-radial derivative.
pub fn radial2_x(f: &dyn Evaluable, x: &DVector<f64>, z: &DVector<f64>, h: f64) -> Complex64 {
    let xu = x.normalize();
    (f.eval_at(&(x + &xu * h), z) + f.eval_at(&(x - &xu * h), z) - f.eval_at(x, z) * 2.0) / (h * h)
}

/// Z-radial derivative `d/d|Z|`.
pub fn radial_z(f: &dyn Evaluable, x: &DVector<f64>, z: &DVector<f64>, h: f64) -> Complex64 {
    let zu = z.normalize();
    (f.eval_at(x, &(z + &zu * h)) - f.eval_at(x, &(z - &zu * h))) / (2.0 * h)
}

/// Second Z-radial derivative.
pub fn radial2_z(f: &dyn Evaluable, x: &DVector<f64>, z: &DVector<f64>, h: f64) -> Complex64 {
    let zu = z.normalize();
    (f.eval_at(x, &(z + &zu * h)) + f.eval_at(x, &(z - &zu * h)) - f.eval_at(x, z) * 2.0) / (h * h)
}

/// Spherical X-Laplacian: `Delta_X` with the radial part dropped,
/// `Delta_X - d2/dr2 - (k-1)/r d/dr`.
pub fn delta_x_spherical(
    f: &dyn Evaluable,
    x: &DVector<f64>,
    z: &DVector<f64>,
    h: f64,
) -> Complex64 {
    let k = x.len() as f64;
    let r = x.norm();
    delta_x(f, x, z, h) - radial2_x(f, x, z, h) - radial_x(f, x, z, h) * ((k - 1.0) / r)
}

/// Spherical Z-Laplacian.
pub fn delta_z_spherical(
    f: &dyn Evaluable,
    x: &DVector<f64>,
    z: &DVector<f64>,
    h: f64,
) -> Complex64 {
    let l = z.len() as f64;
    let r = z.norm();
    delta_z(f, x, z, h) - radial2_z(f, x, z, h) - radial_z(f, x, z, h) * ((l - 1.0) / r)
}
