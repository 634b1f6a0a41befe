//! Zeeman operator blocks in a scaled Hermite basis.
//!
//! `Box_gamma = Delta_X + 2 pi i D_gamma - 4 pi^2 |gamma|^2 (1 + |X|^2/4)`
//! acting on `L^2(R^k)`. With oscillator frequency `omega = pi |gamma|` the
//! quadratic potential is absorbed exactly: the oscillator part is diagonal
//! with eigenvalue `-omega (2n + k) - 4 pi^2 |gamma|^2` on level `n`, and
//! the angular term `D_gamma = sum_ij (J_gamma)_ij a_j^dag a_i` preserves
//! the level, so the operator is block-diagonal with one finite Hermitian
//! block per oscillator level.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::algebra::EndomorphismSpace;
use crate::{CoreError, Result};

/// Scaled Hermite basis: products of 1-D Hermite functions with frequency
/// `omega = pi |gamma|`, truncated at total oscillator level `max_level`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteBasisSpec {
    pub omega: f64,
    pub max_level: usize,
    pub k: usize,
}

impl HermiteBasisSpec {
    pub fn for_gamma(k: usize, gamma: &DVector<f64>, max_level: usize) -> Result<Self> {
        let g = gamma.norm();
        if g == 0.0 {
            return Err(CoreError::InvalidArgument(
                "Box_gamma needs gamma != 0 (the Euclidean case has continuous spectrum)"
                    .to_string(),
            ));
        }
        Ok(HermiteBasisSpec {
            omega: PI * g,
            max_level,
            k,
        })
    }
}

/// All multi-indices with `|n| = level` in `k` slots, lexicographic order.
pub fn level_indices(k: usize, level: usize) -> Vec<Vec<u8>> {
    fn rec(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, slots: usize, rest: usize) {
        if slots == 1 {
            cur.push(rest as u8);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=rest {
            cur.push(v as u8);
            rec(out, cur, slots - 1, rest - v);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut out, &mut Vec::new(), k, level);
    out
}

/// The Hermitian matrix of `Box_gamma` restricted to one oscillator level.
pub fn box_block(
    space: &EndomorphismSpace,
    gamma: &DVector<f64>,
    spec: &HermiteBasisSpec,
    level: usize,
) -> Result<DMatrix<Complex64>> {
    let k = spec.k;
    if k != space.k {
        return Err(CoreError::DimensionMismatch {
            expected: space.k,
            got: k,
        });
    }
    let g = gamma.norm();
    if g == 0.0 {
        return Err(CoreError::InvalidArgument(
            "Box_gamma needs gamma != 0".to_string(),
        ));
    }
    let j = space.j_of(gamma)?;
    let indices = level_indices(k, level);
    let pos: HashMap<&[u8], usize> = indices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_slice(), i))
        .collect();
    let dim = indices.len();
    let diag = -spec.omega * (2.0 * level as f64 + k as f64) - 4.0 * PI * PI * g * g;
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for d in 0..dim {
        a[(d, d)] = Complex64::new(diag, 0.0);
    }
    // 2 pi i D_gamma with D_gamma = sum_{i != j} J_ij a_j^dag a_i:
    // <m| a_j^dag a_i |n> = sqrt(n_i (n_j + 1)) for m = n - e_i + e_j
    let mut scratch = vec![0u8; k];
    for (col, n) in indices.iter().enumerate() {
        for i in 0..k {
            if n[i] == 0 {
                continue;
            }
            for jj in 0..k {
                if jj == i || j[(i, jj)] == 0.0 {
                    continue;
                }
                scratch.copy_from_slice(n);
                scratch[i] -= 1;
                scratch[jj] += 1;
                let row = pos[scratch.as_slice()];
                let amp = (n[i] as f64 * (n[jj] as f64 + 1.0)).sqrt();
                a[(row, col)] += Complex64::new(0.0, 2.0 * PI) * j[(i, jj)] * amp;
            }
        }
    }
    Ok(a)
}

/// All blocks up to `spec.max_level`.
pub fn box_blocks(
    space: &EndomorphismSpace,
    gamma: &DVector<f64>,
    spec: &HermiteBasisSpec,
) -> Result<Vec<DMatrix<Complex64>>> {
    (0..=spec.max_level)
        .map(|n| box_block(space, gamma, spec, n))
        .collect()
}

/// Orthonormal 1-D Hermite function `h_n(x) = H_n(x) e^{-x^2/2} / (2^n n! sqrt(pi))^{1/2}`
/// via the stable three-term recurrence.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut h0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return h0;
    }
    let mut h1 = (2.0f64).sqrt() * x * h0;
    for m in 1..n {
        let next =
            x * (2.0 / (m as f64 + 1.0)).sqrt() * h1 - ((m as f64) / (m as f64 + 1.0)).sqrt() * h0;
        h0 = h1;
        h1 = next;
    }
    h1
}

/// Scaled basis function `psi_n(x) = prod_i omega^{1/4} h_{n_i}(sqrt(omega) x_i)`.
pub fn basis_function(spec: &HermiteBasisSpec, n: &[u8], x: &DVector<f64>) -> f64 {
    let s = spec.omega.sqrt();
    let mut acc = 1.0;
    for (i, &ni) in n.iter().enumerate() {
        acc *= spec.omega.powf(0.25) * hermite_function(ni as usize, s * x[i]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::h_type_space;
    use crate::quad::gauss_hermite;
    use approx::assert_relative_eq;

    #[test]
    fn level_index_counts() {
        // dim of level n in k slots is C(n + k - 1, k - 1)
        assert_eq!(level_indices(2, 0).len(), 1);
        assert_eq!(level_indices(2, 3).len(), 4);
        assert_eq!(level_indices(8, 2).len(), 36);
        assert_eq!(level_indices(8, 6).len(), 1716);
    }

    #[test]
    fn blocks_are_hermitian() {
        let space = h_type_space(3, 1, 1).unwrap();
        let gamma = DVector::from_vec(vec![1.0, 0.5, -0.25]);
        let spec = HermiteBasisSpec::for_gamma(space.k, &gamma, 3).unwrap();
        for level in 0..=3 {
            let a = box_block(&space, &gamma, &spec, level).unwrap();
            assert!((&a - a.adjoint()).map(|c| c.norm()).max() <= 1e-10);
        }
    }

    #[test]
    fn gamma_zero_is_rejected() {
        let space = h_type_space(1, 1, 0).unwrap();
        let gamma = DVector::zeros(1);
        assert!(HermiteBasisSpec::for_gamma(space.k, &gamma, 2).is_err());
    }

    #[test]
    fn hermite_functions_are_orthonormal_under_gauss_hermite() {
        // quadrature nodes carry the weight e^{-x^2}; h_n include e^{-x^2/2},
        // so integrate h_m h_n e^{+x^2} against the weight
        let (xs, ws) = gauss_hermite(40);
        for m in 0..6 {
            for n in 0..6 {
                let mut acc = 0.0;
                for (x, w) in xs.iter().zip(&ws) {
                    acc += w * (x * x).exp() * hermite_function(m, *x) * hermite_function(n, *x);
                }
                let want = if m == n { 1.0 } else { 0.0 };
                assert_relative_eq!(acc, want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn d_gamma_matrix_elements_match_quadrature() {
        // independent route: <psi_m, D_gamma psi_n> on k = 2 by tensor
        // Gauss-Hermite quadrature with a numerical x-gradient
        let space = h_type_space(1, 1, 0).unwrap(); // k = 2, J = [[0,-1],[1,0]]
        let gamma = DVector::from_vec(vec![1.0]);
        let spec = HermiteBasisSpec::for_gamma(2, &gamma, 2).unwrap();
        let j = space.j_of(&gamma).unwrap();
        let (xs, ws) = gauss_hermite(48);
        let s = spec.omega.sqrt();
        let fd = 1e-5;

        // quadrature matrix elements of D = <J X, grad .> between levels
        let mut levels: Vec<Vec<u8>> = Vec::new();
        for n in 0..=2 {
            levels.extend(level_indices(2, n));
        }
        let eval = |n: &[u8], x: &DVector<f64>| basis_function(&spec, n, x);
        let mut quad = DMatrix::<f64>::zeros(levels.len(), levels.len());
        for (col, n) in levels.iter().enumerate() {
            for (row, m) in levels.iter().enumerate() {
                let mut acc = 0.0;
                for (ia, a) in xs.iter().enumerate() {
                    for (ib, b) in xs.iter().enumerate() {
                        // substitute x = node / sqrt(omega) so the Gaussian of
                        // the product of two basis functions matches e^{-x^2}
                        let x = DVector::from_vec(vec![a / s, b / s]);
                        let w = ws[ia] * ws[ib] / (s * s) * (a * a + b * b).exp();
                        let jx = &j * &x;
                        let dplus = eval(n, &(&x + &jx * fd));
                        let dminus = eval(n, &(&x - &jx * fd));
                        acc += w * eval(m, &x) * (dplus - dminus) / (2.0 * fd);
                    }
                }
                quad[(row, col)] = acc;
            }
        }
        // ladder route, embedded across the same index list
        let pos: HashMap<&[u8], usize> = levels
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_slice(), i))
            .collect();
        let mut ladder = DMatrix::<f64>::zeros(levels.len(), levels.len());
        for (col, n) in levels.iter().enumerate() {
            for i in 0..2 {
                if n[i] == 0 {
                    continue;
                }
                for jj in 0..2 {
                    if jj == i || j[(i, jj)] == 0.0 {
                        continue;
                    }
                    let mut m = n.clone();
                    m[i] -= 1;
                    m[jj] += 1;
                    if let Some(&row) = pos.get(m.as_slice()) {
                        ladder[(row, col)] +=
                            j[(i, jj)] * (n[i] as f64 * (n[jj] as f64 + 1.0)).sqrt();
                    }
                }
            }
        }
        for row in 0..levels.len() {
            for col in 0..levels.len() {
                let (lr, lc): (u8, u8) = (
                    levels[row].iter().sum::<u8>(),
                    levels[col].iter().sum::<u8>(),
                );
                if lr != lc {
                    // cross-level elements vanish
                    assert!(quad[(row, col)].abs() < 1e-8, "cross-level leak");
                } else {
                    assert_relative_eq!(
                        quad[(row, col)],
                        ladder[(row, col)],
                        epsilon = 1e-7,
                        max_relative = 1e-6
                    );
                }
            }
        }
    }
}
