//! Pole bases: constant complex bases fixed at a reference direction, and
//! changing orthonormal bases built from the eigenstructure of `J_{V_u}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::sync::Arc;

use crate::algebra::{normalized_endomorphism, EndomorphismSpace};
use crate::{CoreError, Result};

/// Relative singular-value threshold below which a constant basis counts as
/// degenerate at a direction.
pub const SINGULAR_THRESHOLD: f64 = 1e-8;

/// A constant system `Q_1..Q_{k/2}`, the first `a_count` in the a-component,
/// chosen complex-orthonormal at the reference direction `v0`.
#[derive(Clone, Debug)]
pub struct ConstantBasis {
    pub vectors: Vec<DVector<f64>>,
    pub a_count: usize,
    pub v0: DVector<f64>,
}

/// Rule producing an orthonormal complex basis from the eigenstructure of
/// `J_{V_u}` (general spaces use the normalized endomorphism), blockwise in
/// the `(a, b)` splitting.
#[derive(Clone, Debug)]
pub struct ChangingBasis {
    pub a_dim: usize,
    pub b_dim: usize,
}

#[derive(Clone, Debug)]
pub enum PoleBasis {
    Constant(ConstantBasis),
    Changing(ChangingBasis),
}

/// Everything the integrand evaluation needs at a fixed unit direction:
/// basis vectors, their `Jt`-images, eigenrates, and the normalized
/// endomorphism itself.
#[derive(Clone, Debug)]
pub struct BasisAt {
    pub vectors: Vec<DVector<f64>>,
    pub jt_vectors: Vec<DVector<f64>>,
    /// `lambda_i(V_u)`: eigenrates of `J_{V_u}` on each basis line
    /// (identically 1 on Cliffordian spaces); `None` when the basis vectors
    /// are not eigenvectors, i.e. a constant basis on a perturbed space
    pub lambdas: Option<Vec<f64>>,
    pub a_count: usize,
}

impl BasisAt {
    /// Complex coordinate `z_i = <Q_i + i Jt Q_i, X>`.
    pub fn coordinate(&self, i: usize, x: &DVector<f64>) -> Complex64 {
        Complex64::new(self.vectors[i].dot(x), self.jt_vectors[i].dot(x))
    }

    pub fn coordinates(&self, x: &DVector<f64>) -> Vec<Complex64> {
        (0..self.vectors.len())
            .map(|i| self.coordinate(i, x))
            .collect()
    }

    /// `g_ij = grad z_i . grad conj(z_j)`, the coefficient of the
    /// X-Laplacian lowering formula.
    pub fn gram(&self, i: usize, j: usize) -> Complex64 {
        let qq = self.vectors[i].dot(&self.vectors[j]);
        let jj = self.jt_vectors[i].dot(&self.jt_vectors[j]);
        let jq = self.jt_vectors[i].dot(&self.vectors[j]);
        Complex64::new(qq + jj, 2.0 * jq)
    }
}

/// Deterministic complex pairing basis for an orthogonal complex structure
/// `j` restricted to the index range `lo..hi`: returns representatives
/// `u_1, u_2, ...` with `{u_i, j u_i}` orthonormal.
fn pairing_basis(j: &DMatrix<f64>, lo: usize, hi: usize) -> Result<Vec<DVector<f64>>> {
    let k = j.nrows();
    let mut chosen: Vec<DVector<f64>> = Vec::new();
    let mut span: Vec<DVector<f64>> = Vec::new();
    for seed in lo..hi {
        if span.len() >= hi - lo {
            break;
        }
        let mut u = DVector::zeros(k);
        u[seed] = 1.0;
        for s in &span {
            let d = s.dot(&u);
            u -= s * d;
        }
        let n = u.norm();
        if n < 1e-8 {
            continue;
        }
        u /= n;
        fix_sign(&mut u);
        let v = j * &u;
        let vn = v.norm();
        if vn < 1e-10 {
            return Err(CoreError::SingularDirection(vn));
        }
        let v = v / vn;
        chosen.push(u.clone());
        span.push(u);
        span.push(v);
    }
    if 2 * chosen.len() != hi - lo {
        return Err(CoreError::SingularDirection(0.0));
    }
    Ok(chosen)
}

/// Largest-magnitude component made positive; ties break to the first.
fn fix_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() + 1e-14 {
            best = i;
        }
    }
    if v[best] < 0.0 {
        *v *= -1.0;
    }
}

impl PoleBasis {
    /// Constant basis for the space, complex-orthonormal at `V_0 = e_1`.
    pub fn constant_default(space: &EndomorphismSpace) -> Result<Arc<PoleBasis>> {
        let mut v0 = DVector::zeros(space.l);
        v0[0] = 1.0;
        Self::constant_at(space, &v0)
    }

    pub fn constant_at(space: &EndomorphismSpace, v0: &DVector<f64>) -> Result<Arc<PoleBasis>> {
        let j = space.normalized_j(&v0.normalize())?;
        let mut vectors = pairing_basis(&j, 0, space.a_dim)?;
        let b_vectors = pairing_basis(&j, space.a_dim, space.k)?;
        let a_count = vectors.len();
        vectors.extend(b_vectors);
        Ok(Arc::new(PoleBasis::Constant(ConstantBasis {
            vectors,
            a_count,
            v0: v0.clone(),
        })))
    }

    pub fn changing(space: &EndomorphismSpace) -> Arc<PoleBasis> {
        Arc::new(PoleBasis::Changing(ChangingBasis {
            a_dim: space.a_dim,
            b_dim: space.b_dim,
        }))
    }

    pub fn a_count_hint(&self) -> usize {
        match self {
            PoleBasis::Constant(c) => c.a_count,
            PoleBasis::Changing(c) => c.a_dim / 2,
        }
    }

    pub fn len(&self, space: &EndomorphismSpace) -> usize {
        match self {
            PoleBasis::Constant(c) => c.vectors.len(),
            PoleBasis::Changing(_) => space.k / 2,
        }
    }

    /// Instantiate the basis at a unit direction.
    ///
    /// Constant bases are checked for complex independence (rank of
    /// `[Q | Jt Q]`); changing bases are rebuilt from the eigenstructure
    /// with deterministic ordering and sign fixing.
    pub fn at(&self, space: &EndomorphismSpace, v_u: &DVector<f64>) -> Result<BasisAt> {
        match self {
            PoleBasis::Constant(c) => {
                let jt = space.normalized_j(v_u)?;
                let vectors = c.vectors.clone();
                let jt_vectors: Vec<DVector<f64>> = vectors.iter().map(|q| &jt * q).collect();
                let lambdas = if space.is_cliffordian() {
                    Some(vec![1.0; vectors.len()])
                } else {
                    None
                };
                let b = BasisAt {
                    vectors,
                    jt_vectors,
                    lambdas,
                    a_count: c.a_count,
                };
                let rank = independence_ratio(&b, space.k);
                if rank < SINGULAR_THRESHOLD {
                    return Err(CoreError::SingularDirection(rank));
                }
                Ok(b)
            }
            PoleBasis::Changing(ch) => {
                if space.is_cliffordian() {
                    let j = space.normalized_j(v_u)?;
                    let mut vectors = pairing_basis(&j, 0, ch.a_dim)?;
                    vectors.extend(pairing_basis(&j, ch.a_dim, space.k)?);
                    let jt_vectors: Vec<DVector<f64>> = vectors.iter().map(|q| &j * q).collect();
                    let lambdas = Some(vec![1.0; vectors.len()]);
                    Ok(BasisAt {
                        vectors,
                        jt_vectors,
                        lambdas,
                        a_count: ch.a_dim / 2,
                    })
                } else {
                    changing_basis_general(space, ch, v_u)
                }
            }
        }
    }
}

/// sigma_min / sigma_max of `[Q | Jt Q]`.
fn independence_ratio(b: &BasisAt, k: usize) -> f64 {
    let half = b.vectors.len();
    let mut m = DMatrix::<f64>::zeros(k, 2 * half);
    for (i, q) in b.vectors.iter().enumerate() {
        m.set_column(i, q);
        m.set_column(half + i, &b.jt_vectors[i]);
    }
    let svd = m.svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 {
        0.0
    } else {
        smin / smax
    }
}

/// Changing basis on a non-Cliffordian space: per block, eigen-decompose
/// `-J_{V_u}^2`, pick deterministic pairs inside each eigenspace, record the
/// eigenrates.
fn changing_basis_general(
    space: &EndomorphismSpace,
    ch: &ChangingBasis,
    v_u: &DVector<f64>,
) -> Result<BasisAt> {
    let n = normalized_endomorphism(space, v_u)?;
    if n.kernel_dim > 0 {
        return Err(CoreError::SingularDirection(0.0));
    }
    let jv = space.j_of(v_u)?;
    let k = space.k;
    let blocks = [(0usize, ch.a_dim), (ch.a_dim, k)];
    let mut vectors = Vec::with_capacity(k / 2);
    let mut jt_vectors = Vec::with_capacity(k / 2);
    let mut lambdas = Vec::with_capacity(k / 2);
    for &(lo, hi) in &blocks {
        if hi == lo {
            continue;
        }
        let dim = hi - lo;
        let sub = -(jv.view((lo, lo), (dim, dim)) * jv.view((lo, lo), (dim, dim)));
        let sub = (&sub + sub.transpose()) * 0.5;
        let eig = sub.symmetric_eigen();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .partial_cmp(&eig.eigenvalues[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        // walk eigenvectors in order, Gram-Schmidt against the chosen pairs
        let mut span: Vec<DVector<f64>> = Vec::new();
        for &c in &order {
            if span.len() >= dim {
                break;
            }
            let lam2 = eig.eigenvalues[c];
            if lam2 <= 0.0 {
                return Err(CoreError::SingularDirection(lam2));
            }
            let lam = lam2.sqrt();
            let mut u = DVector::<f64>::zeros(k);
            for r in 0..dim {
                u[lo + r] = eig.eigenvectors[(r, c)];
            }
            for s in &span {
                let d = s.dot(&u);
                u -= s * d;
            }
            let nn = u.norm();
            if nn < 1e-8 {
                continue; // already captured by an earlier pair
            }
            u /= nn;
            fix_sign(&mut u);
            // eigen-rate on this line and the conjugate partner
            let v = (&jv * &u) / lam;
            vectors.push(u.clone());
            jt_vectors.push(v.clone());
            lambdas.push(lam);
            span.push(u);
            span.push(v);
        }
        if span.len() != dim {
            return Err(CoreError::SingularDirection(0.0));
        }
    }
    Ok(BasisAt {
        vectors,
        jt_vectors,
        lambdas: Some(lambdas),
        a_count: ch.a_dim / 2,
    })
}

/// `Theta_Q(X, V_u) = <Q + i Jt_{V_u} Q, X>`.
pub fn theta(
    space: &EndomorphismSpace,
    q: &DVector<f64>,
    x: &DVector<f64>,
    v_u: &DVector<f64>,
) -> Result<Complex64> {
    let jt = space.normalized_j(v_u)?;
    Ok(Complex64::new(q.dot(x), (jt * q).dot(x)))
}

/// Complex coordinates of `X` in the basis at `V_u`.
pub fn coordinates(
    space: &EndomorphismSpace,
    basis: &PoleBasis,
    x: &DVector<f64>,
    v_u: &DVector<f64>,
) -> Result<Vec<Complex64>> {
    Ok(basis.at(space, v_u)?.coordinates(x))
}
