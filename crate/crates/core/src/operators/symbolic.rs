//! Exact symbolic operators on polynomials: the Euclidean X-Laplacian,
//! harmonic projection, and directional derivatives along `X -> J_V(X)`.

use crate::poly::{Coeff, PolyExpr, PolyRat};
use crate::{CoreError, Result};
use num_traits::Zero;

/// The Euclidean Laplacian in the X-variables.
pub fn apply_delta_x<C: Coeff>(p: &PolyExpr<C>) -> PolyExpr<C> {
    p.laplacian()
}

/// Directional derivative along the polynomial vector field `W`:
/// `sum_i dp/dx_i * W_i`.
pub fn derivative_along_field<C: Coeff>(p: &PolyExpr<C>, field: &[PolyExpr<C>]) -> PolyExpr<C> {
    let n = p.nvars();
    debug_assert_eq!(field.len(), n);
    let mut out = PolyExpr::zero(n);
    for (i, w) in field.iter().enumerate() {
        out = &out + &(&p.partial(i) * w);
    }
    out
}

/// `D_V p = <grad p, J_V X>` where `j_v` is the `k x k` matrix of `J_V`
/// given row-major with coefficients in the polynomial's ring.
pub fn apply_d_v<C: Coeff>(p: &PolyExpr<C>, j_v: &[Vec<C>]) -> PolyExpr<C> {
    let k = p.nvars();
    debug_assert_eq!(j_v.len(), k);
    let field: Vec<PolyExpr<C>> = j_v.iter().map(|row| PolyExpr::linear_form(row)).collect();
    derivative_along_field(p, &field)
}

/// Exact Gaussian elimination for a (possibly overdetermined, consistent)
/// system over the complex rationals.
fn solve_exact(
    mut a: Vec<Vec<crate::poly::CRat>>,
    mut b: Vec<crate::poly::CRat>,
) -> Result<Vec<crate::poly::CRat>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivot_of_col = vec![usize::MAX; cols];
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].clone().inv();
        for x in a[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        b[r] = b[r].clone() * inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (x, pv) in a[i].iter_mut().zip(&pivot_row) {
                    *x = x.clone() - f.clone() * pv.clone();
                }
                b[i] = b[i].clone() - f * b[r].clone();
            }
        }
        pivot_of_col[c] = r;
        r += 1;
        if r == rows {
            break;
        }
    }
    // consistency of the remaining rows
    if b.iter().skip(r).any(|x| !x.is_zero()) {
        return Err(CoreError::InvalidArgument(
            "harmonicity system is inconsistent".to_string(),
        ));
    }
    let mut x = vec![crate::poly::CRat::zero(); cols];
    for c in 0..cols {
        if pivot_of_col[c] != usize::MAX {
            x[c] = b[pivot_of_col[c]].clone();
        }
    }
    Ok(x)
}

/// Projection of a homogeneous degree-`n` polynomial onto the harmonic
/// subspace, in the form `p + B_1 |X|^2 Lap p + B_2 |X|^4 Lap^2 p + ...`.
///
/// The coefficients are obtained by solving the harmonicity condition
/// `Lap(result) = 0` as an exact linear system; the result is the unique
/// harmonic component of `p` modulo `|X|^2 * (lower degree)`.
pub fn harmonic_projection(p: &PolyRat) -> Result<PolyRat> {
    if p.is_zero() {
        return Ok(p.clone());
    }
    let n = p.require_homogeneous()?;
    if n < 2 {
        return Ok(p.clone());
    }
    let k = p.nvars();
    // iterated Laplacians
    let mut laps: Vec<PolyRat> = vec![p.clone()];
    for _ in 0..(n / 2) {
        let next = laps.last().unwrap().laplacian();
        if next.is_zero() {
            break;
        }
        laps.push(next);
    }
    let m = laps.len() - 1;
    if m == 0 {
        return Ok(p.clone()); // already harmonic
    }
    let norm_sq: PolyRat = PolyExpr::norm_sq(k);
    // q_j = Lap(|X|^(2j) Lap^j p), j = 1..=m; unknowns B_j solve
    // Lap p + sum_j B_j q_j = 0 monomial by monomial
    let mut qs: Vec<PolyRat> = Vec::with_capacity(m);
    let mut pow = PolyExpr::constant(k, crate::poly::crat(1, 1, 0, 1));
    for laps_j in laps.iter().skip(1) {
        pow = &pow * &norm_sq;
        qs.push((&pow * laps_j).laplacian());
    }
    let mut support: std::collections::BTreeSet<Vec<u16>> = std::collections::BTreeSet::new();
    for (e, _) in laps[1].terms() {
        support.insert(e.clone());
    }
    for q in &qs {
        for (e, _) in q.terms() {
            support.insert(e.clone());
        }
    }
    let mut a = Vec::with_capacity(support.len());
    let mut b = Vec::with_capacity(support.len());
    for e in &support {
        a.push(qs.iter().map(|q| q.coeff(e)).collect::<Vec<_>>());
        b.push(-laps[1].coeff(e));
    }
    let coeffs = solve_exact(a, b)?;
    let mut out = p.clone();
    let mut pow = PolyExpr::constant(k, crate::poly::crat(1, 1, 0, 1));
    for (j, c) in coeffs.iter().enumerate() {
        pow = &pow * &norm_sq;
        out = &out + &(&pow * &laps[j + 1]).scale(c);
    }
    debug_assert!(out.laplacian().is_zero());
    Ok(out)
}

/// Universal projection coefficients `B_0 = 1, B_1, ..., B_m` for
/// `Pi^(n) = sum_j B_j |X|^(2j) Lap^j` in dimension `k`, as floats.
///
/// Derived by running the exact projection on the probe polynomial `x_1^n`.
pub fn harmonic_coeffs(n: u32, k: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Ok(vec![1.0]);
    }
    let probe: PolyRat = PolyExpr::var(k, 0).pow(n);
    let proj = harmonic_projection(&probe)?;
    // read B_j off the coefficient of x0^(n-2j) x1^(2j) in the result:
    // |X|^(2j) Lap^j x0^n contributes (n)_2j * x0^(n-2j) * (x1^2 + ...)^j
    // and only the |X|^2-powers produce x1 powers
    let mut out = vec![1.0];
    let mut falling = 1.0;
    for j in 1..=(n / 2) {
        falling *= ((n - 2 * j + 2) * (n - 2 * j + 1)) as f64;
        let mut exps = vec![0u16; k];
        exps[0] = (n - 2 * j) as u16;
        exps[1] = (2 * j) as u16;
        let c = proj.coeff(&exps);
        let b = crate::poly::rational_to_f64(&c.re) / falling;
        out.push(b);
    }
    Ok(out)
}
