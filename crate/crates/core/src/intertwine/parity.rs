//! Fourfold parity decomposition of one- and two-pole integrands.
//!
//! Each `Theta_Q = <Q, X> + i <J_{V_u} Q, X>` factor (and its conjugate)
//! expands into component pieces with or without a `J` and supported in the
//! a- or b-block. Collecting the product terms by the parity of the total
//! `J` count and of the `J^(b)` count splits the function into four parts;
//! kappa acts on them by the signs `(+, -, +, -)` in the b-parity slot
//! because `J^(a)' = J^(a)` and `J^(b)' = -J^(b)`.

use nalgebra::DVector;
use num_complex::Complex64;
use std::sync::Arc;

use crate::algebra::EndomorphismSpace;
use crate::funcspace::{GeneratorProfile, PoleBasis, TwistedFunction, Variant};
use crate::quad::{gauss_legendre_ab, sphere_rule, QuadSpec};
use crate::{CoreError, Result};

/// Parity of the number of `J` factors and of `J^(b)` factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ParityTag {
    pub odd_j: bool,
    pub odd_b: bool,
}

impl ParityTag {
    pub const ALL: [ParityTag; 4] = [
        ParityTag {
            odd_j: false,
            odd_b: false,
        },
        ParityTag {
            odd_j: false,
            odd_b: true,
        },
        ParityTag {
            odd_j: true,
            odd_b: false,
        },
        ParityTag {
            odd_j: true,
            odd_b: true,
        },
    ];

    /// Sign of the kappa action on this part.
    pub fn kappa_sign(&self) -> f64 {
        if self.odd_b {
            -1.0
        } else {
            1.0
        }
    }
}

/// One factor of an expanded term: pole slot, whether it carries `J`, and
/// which block component it reads.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Factor {
    pole: u8,
    jay: bool,
    b_part: bool,
}

#[derive(Clone, Debug, PartialEq)]
struct ExpandedTerm {
    coeff: Complex64,
    factors: Vec<Factor>,
}

/// One parity component of a pole function, evaluable like the original.
#[derive(Clone)]
pub struct ParityPart {
    pub tag: ParityTag,
    space: Arc<EndomorphismSpace>,
    profile: GeneratorProfile,
    /// per pole: (a-component, b-component)
    poles: Vec<(DVector<f64>, DVector<f64>)>,
    terms: Vec<ExpandedTerm>,
}

impl ParityPart {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Re-bind to a sigma-equivalent space (the kappa action up to sign).
    pub fn rebind(&self, space: Arc<EndomorphismSpace>) -> ParityPart {
        let mut out = self.clone();
        out.space = space;
        out
    }

    /// Integrand value at `(X, V_u)`.
    pub fn integrand_at(&self, x: &DVector<f64>, v_u: &DVector<f64>) -> Result<Complex64> {
        let jt = self.space.normalized_j(v_u)?;
        Ok(self.integrand_cached(x, &jt))
    }

    /// The distinct factor values per `(pole, jay, b_part)` are few; cache
    /// them once per direction and reduce each term to table lookups.
    fn factor_table(&self, x: &DVector<f64>, jt: &nalgebra::DMatrix<f64>) -> Vec<[[f64; 2]; 2]> {
        self.poles
            .iter()
            .map(|(qa, qb)| [[qa.dot(x), qb.dot(x)], [(jt * qa).dot(x), (jt * qb).dot(x)]])
            .collect()
    }

    fn integrand_cached(&self, x: &DVector<f64>, jt: &nalgebra::DMatrix<f64>) -> Complex64 {
        let table = self.factor_table(x, jt);
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let mut val = t.coeff;
            for f in &t.factors {
                val *= table[f.pole as usize][f.jay as usize][f.b_part as usize];
            }
            acc += val;
        }
        acc
    }

    /// Quadrature evaluation of the twisted Z-Fourier integral.
    pub fn eval(&self, x: &DVector<f64>, z: &DVector<f64>, quad: &QuadSpec) -> Result<Complex64> {
        quad.validate()?;
        let l = self.space.l;
        let sphere = sphere_rule(l, quad.n_polar, quad.n_azimuth)?;
        let r_max = quad.tail_sigmas * self.profile.vpart.max_width();
        let (rs, ws) = gauss_legendre_ab(quad.n_radial, 0.0, r_max);
        let a_dim = self.space.a_dim;
        let xa = x.rows(0, a_dim).norm();
        let xb = x.rows(a_dim, x.len() - a_dim).norm();
        let xphi = self.profile.xpart.eval(xa, xb);
        let mut acc = Complex64::new(0.0, 0.0);
        for (node, w) in sphere.nodes.iter().zip(&sphere.weights) {
            let jt = self.space.normalized_j(node)?;
            let mono = self.integrand_cached(x, &jt);
            if mono.norm() == 0.0 {
                continue;
            }
            let zdot = z.dot(node);
            let mut node_acc = Complex64::new(0.0, 0.0);
            for (r, wr) in rs.iter().zip(&ws) {
                let kernel = Complex64::new(0.0, r * zdot).exp();
                node_acc += kernel * (wr * r.powi(l as i32 - 1) * self.profile.vpart.eval(*r));
            }
            acc += node_acc * mono * *w;
        }
        Ok(acc * xphi)
    }
}

/// Split the poles of a one- or two-pole function into block components and
/// expand the product into the four parity parts.
///
/// Changing-basis functions are not supported: their parity structure is
/// only defined through the basis-transform map back to a constant system,
/// so the operation is restricted to constant bases.
pub fn parity_decompose(f: &TwistedFunction) -> Result<[ParityPart; 4]> {
    if matches!(&*f.basis, PoleBasis::Changing(_)) {
        return Err(CoreError::Unsupported(
            "parity decomposition needs a constant-basis pole function".to_string(),
        ));
    }
    let a_dim = f.space.a_dim;
    let k = f.space.k;
    let split = |q: &DVector<f64>| {
        let mut qa = DVector::zeros(k);
        let mut qb = DVector::zeros(k);
        for i in 0..k {
            if i < a_dim {
                qa[i] = q[i];
            } else {
                qb[i] = q[i];
            }
        }
        (qa, qb)
    };
    // factor list: (pole index, conjugate?)
    type PoleSplits = Vec<(DVector<f64>, DVector<f64>)>;
    let (poles, factors): (PoleSplits, Vec<(u8, bool)>) = match &f.variant {
        Variant::OnePole { pole, p, q } => {
            let mut fs = Vec::new();
            for _ in 0..*p {
                fs.push((0u8, false));
            }
            for _ in 0..*q {
                fs.push((0u8, true));
            }
            (vec![split(pole)], fs)
        }
        Variant::TwoPole {
            pole_a,
            pole_b,
            pa,
            qa,
            pb,
            qb,
        } => {
            let mut fs = Vec::new();
            for _ in 0..*pa {
                fs.push((0u8, false));
            }
            for _ in 0..*qa {
                fs.push((0u8, true));
            }
            for _ in 0..*pb {
                fs.push((1u8, false));
            }
            for _ in 0..*qb {
                fs.push((1u8, true));
            }
            (vec![split(pole_a), split(pole_b)], fs)
        }
        _ => {
            return Err(CoreError::Unsupported(
                "parity decomposition applies to one- and two-pole variants".to_string(),
            ))
        }
    };

    // expand: each factor contributes 4 pieces
    // (a real, b real, a jay, b jay); conjugates flip the i sign
    let mut terms: Vec<ExpandedTerm> = vec![ExpandedTerm {
        coeff: Complex64::new(1.0, 0.0),
        factors: Vec::new(),
    }];
    for &(pole_idx, conj) in &factors {
        let i_coeff = if conj {
            Complex64::new(0.0, -1.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        let pieces = [
            (false, false, Complex64::new(1.0, 0.0)),
            (false, true, Complex64::new(1.0, 0.0)),
            (true, false, i_coeff),
            (true, true, i_coeff),
        ];
        let mut next = Vec::with_capacity(terms.len() * 4);
        for t in &terms {
            for &(jay, b_part, c) in &pieces {
                let mut nt = t.clone();
                nt.coeff *= c;
                nt.factors.push(Factor {
                    pole: pole_idx,
                    jay,
                    b_part,
                });
                next.push(nt);
            }
        }
        terms = next;
    }

    let mut parts: Vec<ParityPart> = ParityTag::ALL
        .iter()
        .map(|tag| ParityPart {
            tag: *tag,
            space: Arc::clone(&f.space),
            profile: f.profile.clone(),
            poles: poles.clone(),
            terms: Vec::new(),
        })
        .collect();
    for mut t in terms {
        let jays = t.factors.iter().filter(|f| f.jay).count();
        let bjays = t.factors.iter().filter(|f| f.jay && f.b_part).count();
        let tag = ParityTag {
            odd_j: jays % 2 == 1,
            odd_b: bjays % 2 == 1,
        };
        let slot = ParityTag::ALL.iter().position(|t| *t == tag).unwrap();
        // factors commute: canonical order lets equal products merge
        t.factors.sort_by_key(|f| (f.pole, f.jay, f.b_part));
        parts[slot].terms.push(t);
    }
    for part in &mut parts {
        part.terms.sort_by(|a, b| a.factors.cmp(&b.factors));
        let mut merged: Vec<ExpandedTerm> = Vec::with_capacity(part.terms.len());
        for t in part.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.factors == t.factors => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.norm() > 0.0);
        part.terms = merged;
    }
    let mut it = parts.into_iter();
    Ok([
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
    ])
}

/// Symbolic check of the kappa sign table: every term of each part must
/// flip exactly as `(-1)^(number of b-jays)`, i.e. the part's `kappa_sign`.
pub fn kappa_signs_consistent(parts: &[ParityPart; 4]) -> bool {
    parts.iter().all(|part| {
        part.terms.iter().all(|t| {
            let bjays = t.factors.iter().filter(|f| f.jay && f.b_part).count();
            let sign = if bjays % 2 == 1 { -1.0 } else { 1.0 };
            sign == part.tag.kappa_sign()
        })
    })
}
