//! Endomorphism spaces of 2-step nilpotent metric Lie algebras:
//! assembly from Clifford modules, sigma-deformations, normalized
//! endomorphisms and the Ricci H-function.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::clifford::CliffordModule;
use crate::{CoreError, Result};

const CLIFFORD_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpaceTag {
    HType { a: usize, b: usize },
    SigmaDeformed,
    Perturbed { eps: f64, seed: u64 },
    General,
}

/// The linear family `Z -> J_Z` of skew endomorphisms on the X-space,
/// given by `l` generator matrices of size `k x k`.
///
/// `a_dim + b_dim = k` records the invariant splitting used by
/// sigma-deformations and two-pole constructions; spaces assembled from a
/// Clifford module get it from the `(a, b)` block pattern.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SpaceJson", into = "SpaceJson")]
pub struct EndomorphismSpace {
    pub l: usize,
    pub k: usize,
    pub tag: SpaceTag,
    pub a_dim: usize,
    pub b_dim: usize,
    generators: Vec<DMatrix<f64>>,
    generators_int: Option<Vec<DMatrix<i64>>>,
    cliffordian: bool,
}

/// Wire format: `{l, k, tag, a_dim, b_dim, generators}` with each generator a
/// row-major array. Round-trips of integer-valued generators are bit-exact
/// because serde_json prints shortest round-trip decimals.
#[derive(Serialize, Deserialize)]
struct SpaceJson {
    l: usize,
    k: usize,
    tag: SpaceTag,
    a_dim: usize,
    b_dim: usize,
    generators: Vec<Vec<f64>>,
}

impl From<EndomorphismSpace> for SpaceJson {
    fn from(s: EndomorphismSpace) -> Self {
        SpaceJson {
            l: s.l,
            k: s.k,
            tag: s.tag.clone(),
            a_dim: s.a_dim,
            b_dim: s.b_dim,
            generators: s
                .generators
                .iter()
                .map(|g| g.transpose().as_slice().to_vec())
                .collect(),
        }
    }
}

impl TryFrom<SpaceJson> for EndomorphismSpace {
    type Error = CoreError;
    fn try_from(j: SpaceJson) -> Result<Self> {
        if j.generators.len() != j.l {
            return Err(CoreError::DimensionMismatch {
                expected: j.l,
                got: j.generators.len(),
            });
        }
        let gens: Vec<DMatrix<f64>> = j
            .generators
            .iter()
            .map(|rows| DMatrix::from_row_slice(j.k, j.k, rows))
            .collect();
        Ok(EndomorphismSpace::from_generators(
            j.l, j.k, j.a_dim, j.b_dim, j.tag, gens,
        ))
    }
}

impl EndomorphismSpace {
    fn from_generators(
        l: usize,
        k: usize,
        a_dim: usize,
        b_dim: usize,
        tag: SpaceTag,
        generators: Vec<DMatrix<f64>>,
    ) -> Self {
        let generators_int = exact_integer_copy(&generators);
        let cliffordian = clifford_residual(&generators) < CLIFFORD_TOL;
        EndomorphismSpace {
            l,
            k,
            tag,
            a_dim,
            b_dim,
            generators,
            generators_int,
            cliffordian,
        }
    }

    pub fn generators(&self) -> &[DMatrix<f64>] {
        &self.generators
    }

    pub fn generators_int(&self) -> Option<&[DMatrix<i64>]> {
        self.generators_int.as_deref()
    }

    /// Whether `J_Z^2 = -|Z|^2 I` holds to working precision.
    pub fn is_cliffordian(&self) -> bool {
        self.cliffordian
    }

    /// `J_Z = sum_a Z_a J_a`.
    pub fn j_of(&self, z: &DVector<f64>) -> Result<DMatrix<f64>> {
        if z.len() != self.l {
            return Err(CoreError::DimensionMismatch {
                expected: self.l,
                got: z.len(),
            });
        }
        let mut m = DMatrix::<f64>::zeros(self.k, self.k);
        for (alpha, g) in self.generators.iter().enumerate() {
            if z[alpha] != 0.0 {
                m += g * z[alpha];
            }
        }
        Ok(m)
    }

    /// Lie bracket through `<[X,Y], Z> = <J_Z(X), Y>`.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.k || y.len() != self.k {
            return Err(CoreError::DimensionMismatch {
                expected: self.k,
                got: if x.len() != self.k { x.len() } else { y.len() },
            });
        }
        Ok(DVector::from_iterator(
            self.l,
            self.generators.iter().map(|g| (g * x).dot(y)),
        ))
    }

    /// The H-function `H(X, X*, Z, Z*) = <J_Z X, J_{Z*} X*>`; invariant under
    /// sigma-deformations.
    pub fn ricci_h(
        &self,
        x: &DVector<f64>,
        xs: &DVector<f64>,
        z: &DVector<f64>,
        zs: &DVector<f64>,
    ) -> Result<f64> {
        Ok((self.j_of(z)? * x).dot(&(self.j_of(zs)? * xs)))
    }

    /// `R(X, X*) = -(1/2) sum_a H(X, X*, Z_a, Z_a)`.
    pub fn ricci_xx(&self, x: &DVector<f64>, xs: &DVector<f64>) -> Result<f64> {
        let mut s = 0.0;
        for g in &self.generators {
            s += (g * x).dot(&(g * xs));
        }
        Ok(-0.5 * s)
    }

    /// `R(Z, Z*) = (1/4) sum_i H(E_i, E_i, Z, Z*)`.
    pub fn ricci_zz(&self, z: &DVector<f64>, zs: &DVector<f64>) -> Result<f64> {
        let jz = self.j_of(z)?;
        let jzs = self.j_of(zs)?;
        // sum_i <J_Z e_i, J_{Z*} e_i> = tr(J_Z^T J_{Z*})
        Ok(0.25 * (jz.transpose() * jzs).trace())
    }

    /// Mixed Ricci term; identically zero on 2-step nilpotent groups.
    pub fn ricci_xz(&self) -> f64 {
        0.0
    }
}

fn exact_integer_copy(gens: &[DMatrix<f64>]) -> Option<Vec<DMatrix<i64>>> {
    let mut out = Vec::with_capacity(gens.len());
    for g in gens {
        if g.iter()
            .all(|&x| x.fract() == 0.0 && x.abs() < 2f64.powi(52))
        {
            out.push(g.map(|x| x as i64));
        } else {
            return None;
        }
    }
    Some(out)
}

fn clifford_residual(gens: &[DMatrix<f64>]) -> f64 {
    let k = if gens.is_empty() { 0 } else { gens[0].nrows() };
    let id = DMatrix::<f64>::identity(k, k);
    let mut worst: f64 = 0.0;
    for (a, ga) in gens.iter().enumerate() {
        for (b, gb) in gens.iter().enumerate() {
            let mut m = ga * gb + gb * ga;
            if a == b {
                m += &id * 2.0;
            }
            worst = worst.max(m.amax());
        }
    }
    worst
}

/// Assemble `H^{(a,b)}_l` data: `J_a = blockdiag(j_a x a, -j_a x b)`,
/// `k = r (a + b)`.
pub fn assemble_h_type(module: &CliffordModule, a: usize, b: usize) -> Result<EndomorphismSpace> {
    if a + b == 0 {
        return Err(CoreError::InvalidArgument(
            "need a + b >= 1 copies of the irreducible module".to_string(),
        ));
    }
    let r = module.r;
    let k = r * (a + b);
    let generators: Vec<DMatrix<f64>> = module
        .generators()
        .iter()
        .map(|j| {
            let mut g = DMatrix::<f64>::zeros(k, k);
            for c in 0..a + b {
                let sign = if c < a { 1.0 } else { -1.0 };
                g.view_mut((c * r, c * r), (r, r)).copy_from(&(j * sign));
            }
            g
        })
        .collect();
    let tag = match module.perturbation {
        Some((eps, seed)) if eps != 0.0 => SpaceTag::Perturbed { eps, seed },
        _ => SpaceTag::HType { a, b },
    };
    Ok(EndomorphismSpace::from_generators(
        module.l,
        k,
        r * a,
        r * b,
        tag,
        generators,
    ))
}

/// An involutive orthogonal transformation of the X-space commuting with all
/// generators of the space it deforms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SigmaInvolution {
    pub matrix: DMatrix<f64>,
    /// block signature when derived from an `(a, b)` partition
    pub block_signature: Option<(usize, usize)>,
}

impl SigmaInvolution {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let k = matrix.nrows();
        let id = DMatrix::<f64>::identity(k, k);
        if (&matrix * &matrix - &id).amax() > 1e-10 {
            return Err(CoreError::InvalidArgument(
                "sigma is not an involution".to_string(),
            ));
        }
        if (matrix.transpose() * &matrix - &id).amax() > 1e-10 {
            return Err(CoreError::InvalidArgument(
                "sigma is not orthogonal".to_string(),
            ));
        }
        Ok(SigmaInvolution {
            matrix,
            block_signature: None,
        })
    }

    pub fn identity(k: usize) -> Self {
        SigmaInvolution {
            matrix: DMatrix::identity(k, k),
            block_signature: None,
        }
    }
}

/// `sigma = blockdiag(+I on the a-component, -I on the b-component)` of an
/// h-type space.
pub fn sigma_from_partition(space: &EndomorphismSpace) -> Result<SigmaInvolution> {
    match space.tag {
        SpaceTag::HType { .. } | SpaceTag::Perturbed { .. } => {}
        _ => {
            return Err(CoreError::InvalidArgument(
                "sigma_from_partition needs a space assembled from a module".to_string(),
            ))
        }
    }
    let mut m = DMatrix::<f64>::identity(space.k, space.k);
    for i in space.a_dim..space.k {
        m[(i, i)] = -1.0;
    }
    Ok(SigmaInvolution {
        matrix: m,
        block_signature: Some((space.a_dim, space.b_dim)),
    })
}

/// Replace every generator by `sigma J_a`. Requires `sigma` to commute with
/// each generator; `J'_V^2 = J_V^2` then holds automatically.
pub fn sigma_deform(
    space: &EndomorphismSpace,
    sigma: &SigmaInvolution,
) -> Result<EndomorphismSpace> {
    if sigma.matrix.nrows() != space.k {
        return Err(CoreError::DimensionMismatch {
            expected: space.k,
            got: sigma.matrix.nrows(),
        });
    }
    for (alpha, g) in space.generators.iter().enumerate() {
        let residual = (&sigma.matrix * g - g * &sigma.matrix).amax();
        if residual > 1e-10 {
            return Err(CoreError::InvalidDeformation {
                generator: alpha,
                residual,
            });
        }
    }
    let generators: Vec<DMatrix<f64>> =
        space.generators.iter().map(|g| &sigma.matrix * g).collect();
    let (a_dim, b_dim) = sigma.block_signature.unwrap_or((space.a_dim, space.b_dim));
    Ok(EndomorphismSpace::from_generators(
        space.l,
        space.k,
        a_dim,
        b_dim,
        SpaceTag::SigmaDeformed,
        generators,
    ))
}

/// Eigen-structure of `J_V` and the normalized endomorphism sharing its
/// kernel with `J_V` and squaring to `-I` off it.
#[derive(Clone, Debug)]
pub struct NormalizedEndomorphism {
    pub v: DVector<f64>,
    /// positive singular rates `lambda_i`, one per eigenvector, descending;
    /// zeros mark the kernel
    pub lambdas: Vec<f64>,
    /// orthonormal eigenbasis of `-J_V^2`, columns matching `lambdas`
    pub eigenbasis: DMatrix<f64>,
    pub jt: DMatrix<f64>,
    pub kernel_dim: usize,
}

/// Kernel cutoff: eigenvalues of `-J_V^2` below `1e-10 * max` count as zero.
pub const KERNEL_RELATIVE_CUTOFF: f64 = 1e-10;

pub fn normalized_endomorphism(
    space: &EndomorphismSpace,
    v: &DVector<f64>,
) -> Result<NormalizedEndomorphism> {
    if v.norm() == 0.0 {
        return Err(CoreError::InvalidArgument(
            "normalized endomorphism needs V != 0".to_string(),
        ));
    }
    let jv = space.j_of(v)?;
    let s = -(&jv * &jv);
    let s = (&s + s.transpose()) * 0.5;
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..space.k).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap()
            .then(i.cmp(&j))
    });
    let max_ev = order.first().map(|&i| eig.eigenvalues[i]).unwrap_or(0.0);
    let cutoff = KERNEL_RELATIVE_CUTOFF * max_ev.max(0.0);
    let mut lambdas = Vec::with_capacity(space.k);
    let mut basis = DMatrix::<f64>::zeros(space.k, space.k);
    let mut kernel_dim = 0;
    let mut scaler = DMatrix::<f64>::zeros(space.k, space.k);
    for (c, &i) in order.iter().enumerate() {
        let ev = eig.eigenvalues[i];
        basis.set_column(c, &eig.eigenvectors.column(i));
        if ev <= cutoff {
            lambdas.push(0.0);
            kernel_dim += 1;
        } else {
            let lam = ev.sqrt();
            lambdas.push(lam);
            scaler[(c, c)] = 1.0 / lam;
        }
    }
    let jt = &jv * (&basis * scaler * basis.transpose());
    Ok(NormalizedEndomorphism {
        v: v.clone(),
        lambdas,
        eigenbasis: basis,
        jt,
        kernel_dim,
    })
}

impl EndomorphismSpace {
    /// `J_{V_u}` for Cliffordian spaces, the normalized endomorphism
    /// otherwise. `V_u` must be a unit vector.
    pub fn normalized_j(&self, v_u: &DVector<f64>) -> Result<DMatrix<f64>> {
        if (v_u.norm() - 1.0).abs() > 1e-12 {
            return Err(CoreError::InvalidArgument(format!(
                "V_u must be a unit vector, |V_u| = {}",
                v_u.norm()
            )));
        }
        if self.cliffordian {
            self.j_of(v_u)
        } else {
            Ok(normalized_endomorphism(self, v_u)?.jt)
        }
    }
}
