//! Irreducible Clifford modules with skew generators `j_a` satisfying
//! `j_a j_b + j_b j_a = -2 delta_ab I`.
//!
//! Generators are left-multiplication matrices of imaginary units in the
//! Cayley-Dickson algebras (complex numbers, quaternions, octonions), plus
//! one explicit doubling step for `l = 8`. Everything is integer-valued;
//! the float copies are exact.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{CoreError, Result};

/// Basis product `e_i e_j` in the Cayley-Dickson algebra of dimension `2^n`:
/// returns `(sign, index)`.
fn cd_mul(n: u32, i: usize, j: usize) -> (i64, usize) {
    if n == 0 {
        return (1, 0);
    }
    let h = 1usize << (n - 1);
    match (i >= h, j >= h) {
        (false, false) => cd_mul(n - 1, i, j),
        // (x,0)(0,y) = (0, y x)
        (false, true) => {
            let (s, k) = cd_mul(n - 1, j - h, i);
            (s, k + h)
        }
        // (0,x)(y,0) = (0, x conj(y))
        (true, false) => {
            let (s, k) = cd_mul(n - 1, i - h, j);
            (if j == 0 { s } else { -s }, k + h)
        }
        // (0,x)(0,y) = (-conj(y) x, 0)
        (true, true) => {
            let (s, k) = cd_mul(n - 1, j - h, i - h);
            (if j - h == 0 { -s } else { s }, k)
        }
    }
}

/// Left-multiplication matrix of the basis unit `e_m` on the dimension-`2^n`
/// Cayley-Dickson algebra.
fn left_mult_matrix(n: u32, m: usize) -> DMatrix<i64> {
    let dim = 1usize << n;
    let mut a = DMatrix::<i64>::zeros(dim, dim);
    for j in 0..dim {
        let (s, k) = cd_mul(n, m, j);
        a[(k, j)] = s;
    }
    a
}

/// An irreducible Clifford module: `l` skew generators of size `r x r`.
///
/// A perturbed module keeps the same shape but only approximately satisfies
/// the Clifford condition; `clifford_deviation` measures how far it is.
#[derive(Clone, Debug)]
pub struct CliffordModule {
    pub l: usize,
    pub r: usize,
    generators: Vec<DMatrix<f64>>,
    generators_int: Option<Vec<DMatrix<i64>>>,
    pub perturbation: Option<(f64, u64)>,
}

impl CliffordModule {
    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    pub fn generators_int(&self) -> Option<&[DMatrix<i64>]> {
        self.generators_int.as_deref()
    }

    /// Max-norm deviation from `j_a j_b + j_b j_a = -2 delta_ab I` over all
    /// generator pairs.
    pub fn clifford_deviation(&self) -> f64 {
        let r = self.r;
        let mut worst: f64 = 0.0;
        for a in 0..self.l {
            for b in 0..self.l {
                let mut m = &self.generators[a] * &self.generators[b]
                    + &self.generators[b] * &self.generators[a];
                if a == b {
                    m += DMatrix::<f64>::identity(r, r) * 2.0;
                }
                worst = worst.max(m.amax());
            }
        }
        worst
    }

    /// Max-norm deviation from skewness over all generators.
    pub fn skew_deviation(&self) -> f64 {
        self.generators
            .iter()
            .map(|j| (j + j.transpose()).amax())
            .fold(0.0, f64::max)
    }
}

/// Build the irreducible Clifford module for `1 <= l <= 8`.
///
/// The module dimension is whatever the construction produces:
/// 2, 4, 4, 8, 8, 8, 8, 16 for l = 1..8.
pub fn build_irreducible_clifford(l: usize) -> Result<CliffordModule> {
    if l == 0 {
        return Err(CoreError::InvalidArgument("l must be >= 1".to_string()));
    }
    if l > 8 {
        return Err(CoreError::UnsupportedCliffordDim(l));
    }
    let gens_int: Vec<DMatrix<i64>> = match l {
        1 => vec![left_mult_matrix(1, 1)],
        2 | 3 => (1..=l).map(|m| left_mult_matrix(2, m)).collect(),
        4..=7 => (1..=l).map(|m| left_mult_matrix(3, m)).collect(),
        8 => {
            // double the octonion module: P (x) j_a and E (x) I
            let p = DMatrix::<i64>::from_row_slice(2, 2, &[1, 0, 0, -1]);
            let e = DMatrix::<i64>::from_row_slice(2, 2, &[0, -1, 1, 0]);
            let id8 = DMatrix::<i64>::identity(8, 8);
            let mut v: Vec<DMatrix<i64>> = (1..=7)
                .map(|m| p.kronecker(&left_mult_matrix(3, m)))
                .collect();
            v.push(e.kronecker(&id8));
            v
        }
        _ => unreachable!(),
    };
    let r = gens_int[0].nrows();
    let generators = gens_int.iter().map(|g| g.map(|x| x as f64)).collect();
    Ok(CliffordModule {
        l,
        r,
        generators,
        generators_int: Some(gens_int),
        perturbation: None,
    })
}

/// Perturb each generator by a seeded random skew matrix: `j + eps (A - A^T)/2`
/// with `A` filled row-major, per generator in order, from
/// `ChaCha8Rng::seed_from_u64(seed)` with entries uniform on `[-1, 1)`.
///
/// The Clifford condition is relaxed; skewness is preserved exactly.
pub fn perturb_clifford(module: &CliffordModule, eps: f64, seed: u64) -> Result<CliffordModule> {
    if eps < 0.0 {
        return Err(CoreError::InvalidArgument(
            "perturbation magnitude must be >= 0".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = module.r;
    let mut generators = Vec::with_capacity(module.l);
    for g in &module.generators {
        let a = DMatrix::<f64>::from_fn(r, r, |_, _| rng.gen_range(-1.0..1.0));
        let s = (&a - a.transpose()) * 0.5;
        generators.push(g + s * eps);
    }
    Ok(CliffordModule {
        l: module.l,
        r,
        generators,
        generators_int: if eps == 0.0 {
            module.generators_int.clone()
        } else {
            None
        },
        perturbation: Some((eps, seed)),
    })
}
