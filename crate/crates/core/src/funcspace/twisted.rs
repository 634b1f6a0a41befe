//! Twisted Z-Fourier functions
//! `F(X, Z) = int e^{i<Z,V>} phi(|X|, V) prod_i z_i^{p_i} conj(z_i)^{q_i} dV`
//! and their algebra.
//!
//! A function is a sum of monomial terms over a pole basis, each term
//! optionally carrying `|V|`-powers, `|X|`-powers, Laplacian-lowering gram
//! factors and eigenrate factors. That family is closed under the operator
//! images the intertwining identities assert:
//!
//! ```text
//! M F(phi)       = F((q - p) |V| phi)          (per-slot eigenrates in general)
//! Delta_Z F(phi) = F(-|V|^2 phi)
//! Delta_X F      = gram-lowered sum
//! d/d|Z| F(phi)  = -(1/|Z|) (F(|V| phi') + l F(phi))
//! d2/d|Z|2 F     = |Z|^-2 (F(|V|^2 phi'') + 2(l+1) F(|V| phi') + l(l+1) F(phi))
//! ```
//!
//! so the re-binding operator kappa applies to every image algebraically.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::sync::Arc;

use super::basis::{BasisAt, PoleBasis};
use super::profile::GeneratorProfile;
use crate::algebra::EndomorphismSpace;
use crate::operators::{conventions::M_PROFILE_SIGN, harmonic_coeffs};
use crate::quad::{sphere_rule, QuadSpec, SphereRule};
use crate::{CoreError, Result};

/// One integrand term.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    /// `(p_i, q_i)` per basis slot
    pub exps: Vec<(u8, u8)>,
    /// multiply the profile by `|V|^vpow`
    pub vpow: u8,
    /// multiply by `|X|^xpow` (signed; negative only evaluated off X = 0)
    pub xpow: i16,
    /// gram factors `g_ij(V_u)` from X-Laplacian lowering
    pub grams: Vec<(u8, u8)>,
    /// eigenrate factors `lambda_i(V_u)` from angular-momentum images
    pub lams: Vec<u8>,
    /// power of `|J_{V_u} X|^2` (the sigma-invariant H-function factor from
    /// the general Laplacian's middle term; equals `|X|^2` when Cliffordian)
    pub jxsq: u8,
}

impl Term {
    pub fn monomial(exps: Vec<(u8, u8)>) -> Self {
        Term {
            coeff: Complex64::new(1.0, 0.0),
            exps,
            vpow: 0,
            xpow: 0,
            grams: Vec::new(),
            lams: Vec::new(),
            jxsq: 0,
        }
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&(p, q)| (p + q) as u32).sum()
    }
}

/// Which construction produced the function (bookkeeping only).
#[derive(Clone, Debug, PartialEq)]
pub enum Variant {
    Plain,
    Harmonic,
    OnePole {
        pole: DVector<f64>,
        p: u8,
        q: u8,
    },
    TwoPole {
        pole_a: DVector<f64>,
        pole_b: DVector<f64>,
        pa: u8,
        qa: u8,
        pb: u8,
        qb: u8,
    },
}

#[derive(Clone)]
pub struct TwistedFunction {
    pub space: Arc<EndomorphismSpace>,
    pub basis: Arc<PoleBasis>,
    pub profile: GeneratorProfile,
    pub terms: Vec<Term>,
    pub variant: Variant,
}

impl TwistedFunction {
    /// Plain variant with explicit exponents.
    pub fn plain(
        space: Arc<EndomorphismSpace>,
        basis: Arc<PoleBasis>,
        exps: Vec<(u8, u8)>,
        profile: GeneratorProfile,
    ) -> Result<Self> {
        if exps.len() != basis.len(&space) {
            return Err(CoreError::DimensionMismatch {
                expected: basis.len(&space),
                got: exps.len(),
            });
        }
        Ok(TwistedFunction {
            space,
            basis,
            profile,
            terms: vec![Term::monomial(exps)],
            variant: Variant::Plain,
        })
    }

    /// Same specification re-read through another endomorphism space.
    pub fn rebind(&self, space: Arc<EndomorphismSpace>) -> TwistedFunction {
        TwistedFunction {
            space,
            basis: Arc::clone(&self.basis),
            profile: self.profile.clone(),
            terms: self.terms.clone(),
            variant: self.variant.clone(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> TwistedFunction {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= c;
        }
        out
    }

    /// Integrand polynomial value at `(X, V_u)` (without profile or kernel).
    pub fn integrand_at(&self, x: &DVector<f64>, ctx: &BasisAt) -> Result<Complex64> {
        let z = ctx.coordinates(x);
        let xn = x.norm();
        let jxsq = self.jx_norm_sq_if_needed(x, ctx)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            acc += self.term_value(t, &z, xn, jxsq, ctx)?;
        }
        Ok(acc)
    }

    /// `|J_{V_u} X|^2` when some term carries the H-function factor.
    fn jx_norm_sq_if_needed(&self, x: &DVector<f64>, ctx: &BasisAt) -> Result<f64> {
        if self.terms.iter().all(|t| t.jxsq == 0) {
            return Ok(0.0);
        }
        // reconstruct J_{V_u} X from the basis data: for Cliffordian spaces
        // Jt = J_{V_u}; in general J_{V_u} = lambda_i Jt on each basis line
        let lams = ctx.lambdas.as_ref().ok_or_else(|| {
            CoreError::Unsupported(
                "the H-function factor needs a changing basis or a Cliffordian space".to_string(),
            )
        })?;
        // expand X in the real basis {Q_i, Jt Q_i} (orthonormal for changing
        // bases; for constant Cliffordian bases fall back to |X| since
        // lambda = 1 there and |J X| = |X|)
        if lams.iter().all(|&l| (l - 1.0).abs() < 1e-12) {
            return Ok(x.norm_squared());
        }
        let mut acc = 0.0;
        for (i, lam) in lams.iter().enumerate() {
            let a = ctx.vectors[i].dot(x);
            let b = ctx.jt_vectors[i].dot(x);
            acc += lam * lam * (a * a + b * b);
        }
        Ok(acc)
    }

    fn term_value(
        &self,
        t: &Term,
        z: &[Complex64],
        x_norm: f64,
        jx_norm_sq: f64,
        ctx: &BasisAt,
    ) -> Result<Complex64> {
        let mut val = t.coeff;
        for (i, &(p, q)) in t.exps.iter().enumerate() {
            for _ in 0..p {
                val *= z[i];
            }
            for _ in 0..q {
                val *= z[i].conj();
            }
        }
        if t.xpow != 0 {
            val *= x_norm.powi(t.xpow as i32);
        }
        for _ in 0..t.jxsq {
            val *= jx_norm_sq;
        }
        for &(i, j) in &t.grams {
            val *= ctx.gram(i as usize, j as usize);
        }
        if !t.lams.is_empty() {
            let lams = ctx.lambdas.as_ref().ok_or_else(|| {
                CoreError::Unsupported(
                    "eigenrate factors need a changing basis or a Cliffordian space".to_string(),
                )
            })?;
            for &i in &t.lams {
                val *= lams[i as usize];
            }
        }
        Ok(val)
    }

    /// Quadrature evaluation of the twisted Z-Fourier integral over `R^l`.
    pub fn eval(&self, x: &DVector<f64>, z: &DVector<f64>, quad: &QuadSpec) -> Result<Complex64> {
        quad.validate()?;
        let l = self.space.l;
        let sphere = sphere_rule(l, quad.n_polar, quad.n_azimuth)?;
        let r_max = quad.tail_sigmas * self.profile.vpart.max_width();
        let (rs, ws) = crate::quad::gauss_legendre_ab(quad.n_radial, 0.0, r_max);
        self.eval_with_rules(x, z, &sphere, &rs, &ws)
    }

    fn eval_with_rules(
        &self,
        x: &DVector<f64>,
        z: &DVector<f64>,
        sphere: &SphereRule,
        rs: &[f64],
        radial_weights: &[f64],
    ) -> Result<Complex64> {
        let l = self.space.l;
        let a_dim = self.space.a_dim;
        let xa = x.rows(0, a_dim).norm();
        let xb = x.rows(a_dim, x.len() - a_dim).norm();
        let xphi = self.profile.xpart.eval(xa, xb);
        let xn = x.norm();

        // group term values per sphere node by |V|-power
        let max_vpow = self.terms.iter().map(|t| t.vpow).max().unwrap_or(0) as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut by_vpow = vec![Complex64::new(0.0, 0.0); max_vpow + 1];
        for (node, ws) in sphere.nodes.iter().zip(&sphere.weights) {
            let ctx = self.basis.at(&self.space, node)?;
            let zc = ctx.coordinates(x);
            let jxsq = self.jx_norm_sq_if_needed(x, &ctx)?;
            for v in by_vpow.iter_mut() {
                *v = Complex64::new(0.0, 0.0);
            }
            for t in &self.terms {
                by_vpow[t.vpow as usize] += self.term_value(t, &zc, xn, jxsq, &ctx)?;
            }
            let zdot = z.dot(node);
            let mut node_acc = Complex64::new(0.0, 0.0);
            for (r, wr) in rs.iter().zip(radial_weights) {
                let kernel = Complex64::new(0.0, r * zdot).exp();
                let mut poly = Complex64::new(0.0, 0.0);
                let mut rpow = 1.0;
                for v in &by_vpow {
                    poly += v * rpow;
                    rpow *= r;
                }
                node_acc +=
                    kernel * poly * (wr * r.powi(l as i32 - 1) * self.profile.vpart.eval(*r));
            }
            acc += node_acc * *ws;
        }
        Ok(acc * xphi)
    }

    /// `M F`: every slot with `q_i != p_i` contributes
    /// `(q_i - p_i) lambda_i |V|` times the same monomial.
    pub fn m_image(&self) -> Result<TwistedFunction> {
        if !self.space.is_cliffordian() && matches!(*self.basis, PoleBasis::Constant(_)) {
            return Err(CoreError::Unsupported(
                "M on a constant basis needs a Cliffordian space; use a changing basis".to_string(),
            ));
        }
        let mut terms = Vec::new();
        for t in &self.terms {
            for (i, &(p, q)) in t.exps.iter().enumerate() {
                let d = q as f64 - p as f64;
                if d == 0.0 {
                    continue;
                }
                let mut nt = t.clone();
                nt.coeff *= M_PROFILE_SIGN * d;
                nt.vpow += 1;
                nt.lams.push(i as u8);
                terms.push(nt);
            }
        }
        Ok(self.with_terms(terms))
    }

    /// `Delta_Z F(phi) = F(-|V|^2 phi)`.
    pub fn delta_z_image(&self) -> TwistedFunction {
        let mut terms = self.terms.clone();
        for t in &mut terms {
            t.coeff = -t.coeff;
            t.vpow += 2;
        }
        self.with_terms(terms)
    }

    /// `Delta_X F`: the gram-lowering formula
    /// `Delta(|X|^w P) = w (w + k - 2 + 2 deg P) |X|^(w-2) P
    ///                 + |X|^w sum_ij 2 p_i q_j g_ij (P lowered at i, j)`.
    pub fn delta_x_image(&self) -> TwistedFunction {
        let k = self.space.k as f64;
        let mut terms = Vec::new();
        for t in &self.terms {
            let n = t.degree() as f64;
            let w = t.xpow as f64;
            if w != 0.0 {
                let c = w * (w + k - 2.0 + 2.0 * n);
                if c != 0.0 {
                    let mut nt = t.clone();
                    nt.coeff *= c;
                    nt.xpow -= 2;
                    terms.push(nt);
                }
            }
            for (i, &(p, _)) in t.exps.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                for (j, &(_, q)) in t.exps.iter().enumerate() {
                    if q == 0 {
                        continue;
                    }
                    let mut nt = t.clone();
                    nt.coeff *= 2.0 * p as f64 * q as f64;
                    nt.exps[i].0 -= 1;
                    nt.exps[j].1 -= 1;
                    nt.grams.push((i as u8, j as u8));
                    terms.push(nt);
                }
            }
        }
        self.with_terms(terms)
    }

    /// `d/d|X| F` for profiles depending on `V` only: Euler's relation gives
    /// `(xpow + deg) / |X|` per term.
    pub fn radial_x_image(&self) -> Result<TwistedFunction> {
        self.profile.require_constant_xpart()?;
        let mut terms = Vec::new();
        for t in &self.terms {
            let c = t.xpow as f64 + t.degree() as f64;
            if c != 0.0 {
                let mut nt = t.clone();
                nt.coeff *= c;
                nt.xpow -= 1;
                terms.push(nt);
            }
        }
        Ok(self.with_terms(terms))
    }

    /// `F(|V| phi') + l F(phi)`: the bracket of the Z-radial reduction;
    /// `d/d|Z| F = -(1/|Z|) *` this.
    pub fn dz_reduction_bracket(&self) -> Result<TwistedFunction> {
        self.require_plain_vpow()?;
        let l = self.space.l as f64;
        let vp = &self.profile.vpart;
        let new_vpart = vp.d_dr().mul_r_pow(1).add(&vp.scaled(l));
        let mut out = self.clone();
        out.profile.vpart = new_vpart;
        Ok(out)
    }

    /// `F(|V|^2 phi'') + 2(l+1) F(|V| phi') + c0 F(phi)` with `c0 = l(l+1)`;
    /// `d2/d|Z|2 F = |Z|^-2 *` this.
    pub fn d2z_reduction_bracket(&self) -> Result<TwistedFunction> {
        self.d2z_bracket_with_c0(crate::operators::conventions::second_radial_c0(
            self.space.l,
        ))
    }

    /// Same bracket with an explicit constant, for the selection oracle.
    pub fn d2z_bracket_with_c0(&self, c0: f64) -> Result<TwistedFunction> {
        self.require_plain_vpow()?;
        let l = self.space.l as f64;
        let vp = &self.profile.vpart;
        let d1 = vp.d_dr();
        let d2 = d1.d_dr();
        let new_vpart = d2
            .mul_r_pow(2)
            .add(&d1.mul_r_pow(1).scaled(2.0 * (l + 1.0)))
            .add(&vp.scaled(c0));
        let mut out = self.clone();
        out.profile.vpart = new_vpart;
        Ok(out)
    }

    /// The general middle term
    /// `(Delta_Z + (1/4) sum <J_a X, J_b X> d2/dz_a dz_b) F`:
    /// under the kernel this is `F(-|V|^2 phi) - (1/4) |J_{V_u} X|^2 F(|V|^2 phi)`.
    pub fn middle_image(&self) -> TwistedFunction {
        let mut terms = self.delta_z_image().terms;
        for t in &self.terms {
            let mut nt = t.clone();
            nt.coeff *= -0.25;
            nt.vpow += 2;
            nt.jxsq += 1;
            terms.push(nt);
        }
        self.with_terms(terms)
    }

    /// The full Laplacian image `Delta F` as one twisted sum:
    /// `Delta_X`-lowering + middle term + `M`.
    pub fn full_laplacian_image(&self) -> Result<TwistedFunction> {
        let mut terms = self.delta_x_image().terms;
        terms.extend(self.middle_image().terms);
        terms.extend(self.m_image()?.terms);
        Ok(self.with_terms(terms))
    }

    fn require_plain_vpow(&self) -> Result<()> {
        if self.terms.iter().any(|t| t.vpow != 0) {
            return Err(CoreError::Unsupported(
                "Z-radial reductions compose only with the base profile".to_string(),
            ));
        }
        Ok(())
    }

    fn with_terms(&self, terms: Vec<Term>) -> TwistedFunction {
        TwistedFunction {
            space: Arc::clone(&self.space),
            basis: Arc::clone(&self.basis),
            profile: self.profile.clone(),
            terms,
            variant: self.variant.clone(),
        }
    }
}

/// Quadrature evaluation of a twisted Z-Fourier function (free-function
/// form of [`TwistedFunction::eval`]).
pub fn eval_twisted(
    f: &TwistedFunction,
    x: &DVector<f64>,
    z: &DVector<f64>,
    quad: &QuadSpec,
) -> Result<Complex64> {
    f.eval(x, z, quad)
}

/// Fit `target` into the real span of `vectors`; returns coefficients.
fn fit_in_span(vectors: &[&DVector<f64>], target: &DVector<f64>) -> Result<Vec<f64>> {
    if vectors.is_empty() {
        return Err(CoreError::InvalidPole(target.norm()));
    }
    let k = target.len();
    let mut m = DMatrix::<f64>::zeros(k, vectors.len());
    for (c, v) in vectors.iter().enumerate() {
        m.set_column(c, v);
    }
    let svd = m.clone().svd(true, true);
    let coef = svd
        .solve(target, 1e-12)
        .map_err(|e| CoreError::InvalidArgument(e.to_string()))?;
    let residual = (&m * &coef - target).norm();
    if residual > 1e-10 * target.norm().max(1.0) {
        return Err(CoreError::InvalidPole(residual));
    }
    Ok(coef.iter().copied().collect())
}

/// Multinomial expansion of `(sum_j c_j z_j)^p` into exponent vectors.
fn expand_power(coeffs: &[f64], p: u8, slots: &[usize]) -> Vec<(Vec<u8>, f64)> {
    let mut acc: Vec<(Vec<u8>, f64)> = vec![(vec![0u8; coeffs.len()], 1.0)];
    for _ in 0..p {
        let mut next: Vec<(Vec<u8>, f64)> = Vec::new();
        for (e, c) in &acc {
            for (j, cj) in coeffs.iter().enumerate() {
                if *cj == 0.0 {
                    continue;
                }
                let mut en = e.clone();
                en[j] += 1;
                next.push((en, c * cj));
            }
        }
        // merge duplicates
        next.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Vec<u8>, f64)> = Vec::new();
        for (e, c) in next {
            if let Some(last) = merged.last_mut() {
                if last.0 == e {
                    last.1 += c;
                    continue;
                }
            }
            merged.push((e, c));
        }
        acc = merged;
    }
    let _ = slots;
    acc
}

/// One-pole function `F_{Q p q}(phi)`: the pole must lie in the real span of
/// the constant basis; the monomial expands into basis coordinates.
pub fn make_one_pole(
    space: Arc<EndomorphismSpace>,
    basis: Arc<PoleBasis>,
    pole: &DVector<f64>,
    p: u8,
    q: u8,
    profile: GeneratorProfile,
) -> Result<TwistedFunction> {
    let cb = match &*basis {
        PoleBasis::Constant(c) => c,
        PoleBasis::Changing(_) => {
            return Err(CoreError::Unsupported(
                "one-pole functions need a constant basis".to_string(),
            ))
        }
    };
    let refs: Vec<&DVector<f64>> = cb.vectors.iter().collect();
    let coeffs = fit_in_span(&refs, pole)?;
    let half = cb.vectors.len();
    let slots: Vec<usize> = (0..half).collect();
    let zpart = expand_power(&coeffs, p, &slots);
    let zbar = expand_power(&coeffs, q, &slots);
    let mut terms = Vec::new();
    for (ep, cp) in &zpart {
        for (eq, cq) in &zbar {
            let exps: Vec<(u8, u8)> = ep.iter().zip(eq).map(|(&a, &b)| (a, b)).collect();
            let mut t = Term::monomial(exps);
            t.coeff = Complex64::new(cp * cq, 0.0);
            terms.push(t);
        }
    }
    Ok(TwistedFunction {
        space,
        basis,
        profile,
        terms,
        variant: Variant::OnePole {
            pole: pole.clone(),
            p,
            q,
        },
    })
}

/// Two-pole function with poles in the two invariant components.
#[allow(clippy::too_many_arguments)]
pub fn make_two_pole(
    space: Arc<EndomorphismSpace>,
    basis: Arc<PoleBasis>,
    pole_a: &DVector<f64>,
    pole_b: &DVector<f64>,
    pa: u8,
    qa: u8,
    pb: u8,
    qb: u8,
    profile: GeneratorProfile,
) -> Result<TwistedFunction> {
    let cb = match &*basis {
        PoleBasis::Constant(c) => c,
        PoleBasis::Changing(_) => {
            return Err(CoreError::Unsupported(
                "two-pole functions need a constant basis".to_string(),
            ))
        }
    };
    let half = cb.vectors.len();
    let a_refs: Vec<&DVector<f64>> = cb.vectors[..cb.a_count].iter().collect();
    let b_refs: Vec<&DVector<f64>> = cb.vectors[cb.a_count..].iter().collect();
    let ca = fit_in_span(&a_refs, pole_a)?;
    let cb_coeff = fit_in_span(&b_refs, pole_b)?;
    // embed in full slot vectors
    let mut ca_full = vec![0.0; half];
    ca_full[..cb.a_count].copy_from_slice(&ca);
    let mut cb_full = vec![0.0; half];
    cb_full[cb.a_count..].copy_from_slice(&cb_coeff);
    let slots: Vec<usize> = (0..half).collect();
    let za = expand_power(&ca_full, pa, &slots);
    let za_bar = expand_power(&ca_full, qa, &slots);
    let zb = expand_power(&cb_full, pb, &slots);
    let zb_bar = expand_power(&cb_full, qb, &slots);
    let mut terms = Vec::new();
    for (e1, c1) in &za {
        for (e2, c2) in &za_bar {
            for (e3, c3) in &zb {
                for (e4, c4) in &zb_bar {
                    let exps: Vec<(u8, u8)> =
                        (0..half).map(|i| (e1[i] + e3[i], e2[i] + e4[i])).collect();
                    let mut t = Term::monomial(exps);
                    t.coeff = Complex64::new(c1 * c2 * c3 * c4, 0.0);
                    terms.push(t);
                }
            }
        }
    }
    Ok(TwistedFunction {
        space,
        basis,
        profile,
        terms,
        variant: Variant::TwoPole {
            pole_a: pole_a.clone(),
            pole_b: pole_b.clone(),
            pa,
            qa,
            pb,
            qb,
        },
    })
}

/// Replace the integrand polynomial by its harmonic projection
/// `Pi^(n) = sum_j B_j |X|^(2j) Delta^j` (per homogeneous component).
pub fn make_harmonic(f: &TwistedFunction) -> Result<TwistedFunction> {
    let k = f.space.k;
    let mut out_terms: Vec<Term> = Vec::new();
    // group terms by total degree so each gets its own projection order
    let mut by_degree: std::collections::BTreeMap<u32, Vec<Term>> = Default::default();
    for t in &f.terms {
        if t.xpow != 0 || !t.grams.is_empty() {
            return Err(CoreError::Unsupported(
                "harmonic projection applies to plain monomial integrands".to_string(),
            ));
        }
        by_degree.entry(t.degree()).or_default().push(t.clone());
    }
    for (n, terms) in by_degree {
        let coeffs = harmonic_coeffs(n, k)?;
        let mut current = terms;
        for (j, bj) in coeffs.iter().enumerate() {
            if j > 0 {
                // one more Laplacian lowering
                let probe = f.with_terms(current.clone());
                current = probe.delta_x_image().terms;
                if current.is_empty() {
                    break;
                }
            }
            for t in &current {
                let mut nt = t.clone();
                nt.coeff *= *bj;
                nt.xpow += 2 * j as i16;
                out_terms.push(nt);
            }
        }
    }
    let mut out = f.with_terms(out_terms);
    out.variant = Variant::Harmonic;
    Ok(out)
}

/// Sphere-supported Z-Fourier transform
/// `oint_{S_R} e^{i<Z,V>} phi(|X|, V) Theta_Q^p conj(Theta_Q)^q dV`.
#[allow(clippy::too_many_arguments)]
pub fn eval_sphere_fourier(
    space: &EndomorphismSpace,
    pole: &DVector<f64>,
    p: u8,
    q: u8,
    r_z: f64,
    phi: &dyn Fn(f64, &DVector<f64>) -> Complex64,
    x: &DVector<f64>,
    z: &DVector<f64>,
    quad: &QuadSpec,
) -> Result<Complex64> {
    if r_z <= 0.0 {
        return Err(CoreError::InvalidArgument(
            "sphere Fourier transform needs R_Z > 0".to_string(),
        ));
    }
    quad.validate()?;
    let sphere = sphere_rule(space.l, quad.n_polar, quad.n_azimuth)?;
    let xn = x.norm();
    let surf = r_z.powi(space.l as i32 - 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for (node, w) in sphere.nodes.iter().zip(&sphere.weights) {
        let jt = space.normalized_j(node)?;
        let th = Complex64::new(pole.dot(x), (&jt * pole).dot(x));
        let mut mono = Complex64::new(1.0, 0.0);
        for _ in 0..p {
            mono *= th;
        }
        for _ in 0..q {
            mono *= th.conj();
        }
        let v = node * r_z;
        let kernel = Complex64::new(0.0, z.dot(&v)).exp();
        acc += kernel * mono * phi(xn, &v) * (w * surf);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::h_type_space;
    use crate::funcspace::profile::GeneratorProfile;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn l3_space() -> Arc<EndomorphismSpace> {
        Arc::new(h_type_space(3, 1, 1).unwrap())
    }

    #[test]
    fn gaussian_fourier_oracle() {
        // all exponents zero: int e^{i<Z,V>} e^{-|V|^2/2} dV = (2 pi)^{3/2} e^{-|Z|^2/2}
        let space = l3_space();
        let basis = PoleBasis::constant_default(&space).unwrap();
        let f = TwistedFunction::plain(
            Arc::clone(&space),
            basis,
            vec![(0, 0); 4],
            GeneratorProfile::standard_gaussian(),
        )
        .unwrap();
        let quad = QuadSpec::preset("l3-default").unwrap();
        let x = DVector::from_vec(vec![0.3, 0.1, -0.2, 0.4, 0.0, 0.5, -0.1, 0.2]);
        for zv in [vec![0.0, 0.0, 0.0], vec![0.7, -0.4, 1.1]] {
            let z = DVector::from_vec(zv);
            let got = f.eval(&x, &z, &quad).unwrap();
            let want = (2.0 * PI).powf(1.5) * (-z.norm_squared() / 2.0).exp();
            assert_relative_eq!(got.re, want, max_relative = 1e-9);
            assert!(got.im.abs() < 1e-9);
        }
    }

    #[test]
    fn vanishes_at_x_zero_with_positive_degree() {
        let space = l3_space();
        let basis = PoleBasis::constant_default(&space).unwrap();
        let f = TwistedFunction::plain(
            Arc::clone(&space),
            basis,
            vec![(1, 0), (0, 0), (0, 1), (0, 0)],
            GeneratorProfile::standard_gaussian(),
        )
        .unwrap();
        let quad = QuadSpec::preset("l3-default").unwrap();
        let z = DVector::from_vec(vec![0.5, 0.2, -0.1]);
        let got = f.eval(&DVector::zeros(8), &z, &quad).unwrap();
        assert!(got.norm() < 1e-14);
    }

    #[test]
    fn self_convergence_under_refinement() {
        let space = l3_space();
        let basis = PoleBasis::constant_default(&space).unwrap();
        let f = TwistedFunction::plain(
            Arc::clone(&space),
            basis,
            vec![(1, 1), (1, 0), (0, 0), (0, 1)],
            GeneratorProfile::standard_gaussian(),
        )
        .unwrap();
        let quad = QuadSpec::preset("l3-default").unwrap();
        let x = DVector::from_vec(vec![0.6, 0.1, -0.4, 0.2, 0.3, -0.5, 0.2, 0.1]);
        let z = DVector::from_vec(vec![0.8, -0.3, 0.5]);
        let a = f.eval(&x, &z, &quad).unwrap();
        let b = f.eval(&x, &z, &quad.refined()).unwrap();
        assert!(
            (a - b).norm() < 1e-8 * b.norm().max(1.0),
            "refinement moved the value by {}",
            (a - b).norm()
        );
    }

    #[test]
    fn one_pole_reductions() {
        let space = l3_space();
        let basis = PoleBasis::constant_default(&space).unwrap();
        let profile = GeneratorProfile::standard_gaussian();
        let cb = match &*basis {
            PoleBasis::Constant(c) => c.vectors.clone(),
            _ => unreachable!(),
        };
        // p = q = 0 reduces to the plain variant
        let f0 = make_one_pole(
            Arc::clone(&space),
            Arc::clone(&basis),
            &cb[0],
            0,
            0,
            profile.clone(),
        )
        .unwrap();
        assert_eq!(f0.terms.len(), 1);
        assert_eq!(f0.terms[0].degree(), 0);
        // pole = Q_1, p = 1, q = 0 equals the basis monomial z_1
        let f1 = make_one_pole(
            Arc::clone(&space),
            Arc::clone(&basis),
            &cb[0],
            1,
            0,
            profile.clone(),
        )
        .unwrap();
        assert_eq!(f1.terms.len(), 1);
        assert_eq!(f1.terms[0].exps[0], (1, 0));
        assert_relative_eq!(f1.terms[0].coeff.re, 1.0, epsilon = 1e-12);
        // pole outside the real span is rejected: J_{V_0} Q_1 is orthogonal
        // to the span of a complex basis
        let mut v0 = DVector::zeros(3);
        v0[0] = 1.0;
        let bad = space.j_of(&v0).unwrap() * &cb[0];
        assert!(matches!(
            make_one_pole(
                Arc::clone(&space),
                Arc::clone(&basis),
                &bad,
                1,
                0,
                profile.clone()
            ),
            Err(CoreError::InvalidPole(_))
        ));
        // a generic pole in the span expands with matching evaluation
        let pole = &cb[0] * 0.7 - &cb[2] * 1.3;
        let f =
            make_one_pole(Arc::clone(&space), Arc::clone(&basis), &pole, 2, 1, profile).unwrap();
        let mut rngv = DVector::zeros(3);
        rngv[0] = 0.6;
        rngv[1] = 0.8;
        let x = DVector::from_vec(vec![0.4, -0.2, 0.1, 0.7, 0.3, 0.2, -0.5, 0.1]);
        let ctx = f.basis.at(&space, &rngv).unwrap();
        let direct = {
            let th = super::super::basis::theta(&space, &pole, &x, &rngv).unwrap();
            th * th * th.conj()
        };
        let expanded = f.integrand_at(&x, &ctx).unwrap();
        assert_relative_eq!(direct.re, expanded.re, max_relative = 1e-10);
        assert_relative_eq!(direct.im, expanded.im, max_relative = 1e-10);
    }

    #[test]
    fn two_pole_matches_one_pole_when_b_part_trivial() {
        let space = l3_space();
        let basis = PoleBasis::constant_default(&space).unwrap();
        let profile = GeneratorProfile::standard_gaussian();
        let (qa, qb) = match &*basis {
            PoleBasis::Constant(c) => (c.vectors[0].clone(), c.vectors[c.a_count].clone()),
            _ => unreachable!(),
        };
        let f2 = make_two_pole(
            Arc::clone(&space),
            Arc::clone(&basis),
            &qa,
            &qb,
            2,
            1,
            0,
            0,
            profile.clone(),
        )
        .unwrap();
        let f1 = make_one_pole(Arc::clone(&space), Arc::clone(&basis), &qa, 2, 1, profile).unwrap();
        let quad = QuadSpec::preset("l3-default").unwrap();
        let x = DVector::from_vec(vec![0.4, -0.2, 0.1, 0.7, 0.3, 0.2, -0.5, 0.1]);
        let z = DVector::from_vec(vec![0.2, 0.5, -0.3]);
        let a = f2.eval(&x, &z, &quad).unwrap();
        let b = f1.eval(&x, &z, &quad).unwrap();
        assert_relative_eq!(a.re, b.re, max_relative = 1e-12, epsilon = 1e-12);
        assert_relative_eq!(a.im, b.im, max_relative = 1e-12, epsilon = 1e-12);
    }

    #[test]
    fn sphere_fourier_spherical_mean_oracle() {
        // p = q = 0, phi = 1, l = 3: the spherical mean of the plane wave,
        // 4 pi R^2 sinc(R |Z|) = 4 pi R sin(R|Z|) / |Z|
        let space = l3_space();
        let quad = QuadSpec::preset("l3-default").unwrap();
        let pole = DVector::from_fn(8, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let phi = |_xn: f64, _v: &DVector<f64>| Complex64::new(1.0, 0.0);
        let x = DVector::zeros(8);
        let r = 1.7;
        for zv in [vec![0.9, -0.2, 0.4], vec![0.05, 0.0, 0.0]] {
            let z = DVector::from_vec(zv);
            let got = eval_sphere_fourier(&space, &pole, 0, 0, r, &phi, &x, &z, &quad).unwrap();
            let want = 4.0 * PI * r * (r * z.norm()).sin() / z.norm();
            assert_relative_eq!(got.re, want, max_relative = 1e-8);
            assert!(got.im.abs() < 1e-10);
        }
        // Z = 0: surface area of S_R
        let got = eval_sphere_fourier(&space, &pole, 0, 0, r, &phi, &x, &DVector::zeros(3), &quad)
            .unwrap();
        assert_relative_eq!(got.re, 4.0 * PI * r * r, max_relative = 1e-12);
        assert!(eval_sphere_fourier(
            &space,
            &pole,
            0,
            0,
            -1.0,
            &phi,
            &x,
            &DVector::zeros(3),
            &quad
        )
        .is_err());
    }

    #[test]
    fn integrand_linear_in_profile_and_multiplicative() {
        // linearity in phi: the evaluation of a profile sum is the sum of
        // evaluations; multiplicativity of disjoint exponent concatenation
        // holds at integrand level for fixed V_u
        let space = l3_space();
        let basis = PoleBasis::constant_default(&space).unwrap();
        let quad = QuadSpec::preset("l3-default").unwrap();
        let x = DVector::from_vec(vec![0.4, -0.2, 0.1, 0.7, 0.3, 0.2, -0.5, 0.1]);
        let z = DVector::from_vec(vec![0.2, 0.5, -0.3]);
        let mk = |width: f64, exps: Vec<(u8, u8)>| {
            TwistedFunction::plain(
                Arc::clone(&space),
                Arc::clone(&basis),
                exps,
                GeneratorProfile::with_width(width),
            )
            .unwrap()
        };
        // equal widths keep the radial rule identical so linearity is exact
        let f1 = mk(1.0, vec![(1, 0), (0, 0), (0, 1), (0, 0)]);
        let mut f2 = mk(1.0, vec![(1, 0), (0, 0), (0, 1), (0, 0)]);
        f2.profile.vpart = f2.profile.vpart.mul_r_pow(2).scaled(0.5);
        let mut fsum = f1.clone();
        fsum.profile.vpart = f1.profile.vpart.add(&f2.profile.vpart);
        let a = f1.eval(&x, &z, &quad).unwrap() + f2.eval(&x, &z, &quad).unwrap();
        let b = fsum.eval(&x, &z, &quad).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
        // disjoint concatenation at fixed V_u
        let ga = mk(1.0, vec![(2, 0), (0, 0), (0, 0), (0, 0)]);
        let gb = mk(1.0, vec![(0, 0), (0, 1), (0, 0), (0, 0)]);
        let gc = mk(1.0, vec![(2, 0), (0, 1), (0, 0), (0, 0)]);
        let vu = DVector::from_vec(vec![0.6, 0.0, 0.8]);
        let ctx = basis.at(&space, &vu).unwrap();
        let prod = ga.integrand_at(&x, &ctx).unwrap() * gb.integrand_at(&x, &ctx).unwrap();
        let joint = gc.integrand_at(&x, &ctx).unwrap();
        assert!((prod - joint).norm() < 1e-12 * joint.norm().max(1.0));
    }

    #[test]
    fn harmonic_projection_of_balanced_pair() {
        // z_1 conj(z_1) has degree 2; its projection must be killed by the
        // numeric X-Laplacian of the integrand
        let space = l3_space();
        let basis = PoleBasis::changing(&space);
        let f = TwistedFunction::plain(
            Arc::clone(&space),
            basis,
            vec![(1, 1), (0, 0), (0, 0), (0, 0)],
            GeneratorProfile::standard_gaussian(),
        )
        .unwrap();
        let hf = make_harmonic(&f).unwrap();
        let mut vu = DVector::zeros(3);
        vu[0] = 3.0 / 5.0;
        vu[1] = 4.0 / 5.0;
        let ctx = hf.basis.at(&space, &vu).unwrap();
        // numeric Laplacian of the integrand in X
        let x0 = DVector::from_vec(vec![0.4, -0.2, 0.1, 0.7, 0.3, 0.2, -0.5, 0.1]);
        let h = 1e-4;
        let mut lap = Complex64::new(0.0, 0.0);
        let c = hf.integrand_at(&x0, &ctx).unwrap() * 2.0;
        for i in 0..8 {
            let mut xp = x0.clone();
            xp[i] += h;
            let mut xm = x0.clone();
            xm[i] -= h;
            lap += hf.integrand_at(&xp, &ctx).unwrap() + hf.integrand_at(&xm, &ctx).unwrap() - c;
        }
        lap /= h * h;
        assert!(lap.norm() < 1e-5, "laplacian residual {}", lap.norm());
    }
}
