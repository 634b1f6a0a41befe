//! Sparse multivariate polynomials in the X-coordinates.
//!
//! `PolyExpr` is the carrier for the symbolic differential operators:
//! coefficients are generic so the same code runs in exact complex-rational
//! arithmetic (harmonic projection, eigenrelation identities) and in
//! `Complex64` at the evaluation boundary. Canonical form keeps no zero
//! coefficients and orders terms lexicographically by exponent vector.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::{CoreError, Result};

/// Complex rational scalar used by the exact symbolic mode.
pub type CRat = Complex<BigRational>;
/// Exact polynomial.
pub type PolyRat = PolyExpr<CRat>;
/// Floating polynomial.
pub type PolyC = PolyExpr<Complex<f64>>;

/// Coefficient ring bound: enough arithmetic for polynomial algebra.
pub trait Coeff:
    Clone
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
}

impl<T> Coeff for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
{
}

/// Build an exact rational from an integer pair.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Build an exact complex rational.
pub fn crat(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> CRat {
    Complex::new(rat(re_num, re_den), rat(im_num, im_den))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyExpr<C: Coeff> {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, C>,
}

impl<C: Coeff> PolyExpr<C> {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate monomial `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0u16; nvars];
        exps[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(exps, C::one());
        p
    }

    /// A linear form `sum_i coeffs[i] x_i`.
    pub fn linear_form(coeffs: &[C]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut exps = vec![0u16; n];
            exps[i] = 1;
            p.add_term(exps, c.clone());
        }
        p
    }

    /// `|X|^2` restricted to the index range `lo..hi`.
    pub fn norm_sq_range(nvars: usize, lo: usize, hi: usize) -> Self {
        let mut p = Self::zero(nvars);
        for i in lo..hi {
            let mut exps = vec![0u16; nvars];
            exps[i] = 2;
            p.add_term(exps, C::one());
        }
        p
    }

    pub fn norm_sq(nvars: usize) -> Self {
        Self::norm_sq_range(nvars, 0, nvars)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &C)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u16>, c: C) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let mut out = Self::zero(self.nvars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(self.nvars, C::one());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to `x_i`.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, a) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut en = e.clone();
            en[i] -= 1;
            let mut k = C::zero();
            for _ in 0..e[i] {
                k = k + C::one();
            }
            out.add_term(en, a.clone() * k);
        }
        out
    }

    /// Euclidean Laplacian `sum_i d^2/dx_i^2`.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.nvars);
        for i in 0..self.nvars {
            out = &out + &self.partial(i).partial(i);
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Total degree if every term shares it.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for e in self.terms.keys() {
            let d: u32 = e.iter().map(|&x| x as u32).sum();
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return None,
                _ => {}
            }
        }
        deg
    }

    /// Requires a homogeneous input; errors otherwise.
    pub fn require_homogeneous(&self) -> Result<u32> {
        self.homogeneous_degree()
            .ok_or_else(|| CoreError::InvalidArgument("polynomial is not homogeneous".to_string()))
    }

    pub fn eval(&self, point: &[C]) -> C {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = C::zero();
        for (e, a) in &self.terms {
            let mut t = a.clone();
            for (i, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    t = t * point[i].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn coeff(&self, exps: &[u16]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> PolyExpr<D> {
        let mut out = PolyExpr::zero(self.nvars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), f(a));
        }
        out
    }
}

impl PolyRat {
    /// Lower to floating-point coefficients.
    pub fn to_f64(&self) -> PolyC {
        self.map_coeffs(|c| Complex::new(rational_to_f64(&c.re), rational_to_f64(&c.im)))
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl<C: Coeff> Add for &PolyExpr<C> {
    type Output = PolyExpr<C>;
    fn add(self, rhs: &PolyExpr<C>) -> PolyExpr<C> {
        let mut out = self.clone();
        for (e, a) in &rhs.terms {
            out.add_term(e.clone(), a.clone());
        }
        out
    }
}

impl<C: Coeff> Sub for &PolyExpr<C> {
    type Output = PolyExpr<C>;
    fn sub(self, rhs: &PolyExpr<C>) -> PolyExpr<C> {
        let mut out = self.clone();
        for (e, a) in &rhs.terms {
            out.add_term(e.clone(), -a.clone());
        }
        out
    }
}

impl<C: Coeff> Mul for &PolyExpr<C> {
    type Output = PolyExpr<C>;
    // exponent vectors add under monomial multiplication
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &PolyExpr<C>) -> PolyExpr<C> {
        let mut out = PolyExpr::zero(self.nvars);
        for (e1, a1) in &self.terms {
            for (e2, a2) in &rhs.terms {
                let e: Vec<u16> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                out.add_term(e, a1.clone() * a2.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Neg for &PolyExpr<C> {
    type Output = PolyExpr<C>;
    fn neg(self) -> PolyExpr<C> {
        let mut out = PolyExpr::zero(self.nvars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), -a.clone());
        }
        out
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for PolyExpr<C> {
    /// Canonical text form: terms in lexicographic exponent order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, a) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", a)?;
            for (i, &p) in e.iter().enumerate() {
                if p == 1 {
                    write!(f, "*x{}", i)?;
                } else if p > 1 {
                    write!(f, "*x{}^{}", i, p)?;
                }
            }
        }
        Ok(())
    }
}
