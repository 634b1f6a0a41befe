//! Isospectrality verification: orthogonal conjugators between skew
//! endomorphisms, Zeeman spectra from Hermite blocks, an independent
//! finite-difference grid route, torus-bundle truncations, and spectrum
//! comparison.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::algebra::EndomorphismSpace;
use crate::operators::{box_block, HermiteBasisSpec};
use crate::{linalg, CoreError, Result};

/// Clustering gap (relative to the spectral scale) for multiplicity counting.
pub const DEGENERACY_GAP: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpectrumMethod {
    HermiteBlock,
    Grid,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockSpectrum {
    pub level: usize,
    /// ascending
    pub eigenvalues: Vec<f64>,
}

/// Sorted eigenvalue data with block and degeneracy metadata.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub space_id: String,
    pub gamma: Vec<f64>,
    pub method: SpectrumMethod,
    pub truncation_level: usize,
    pub blocks: Vec<BlockSpectrum>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl SpectrumReport {
    /// All eigenvalues merged ascending.
    pub fn merged(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|b| b.eigenvalues.iter().copied())
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    /// Eigenvalues clustered into (value, multiplicity) pairs.
    pub fn with_multiplicities(&self) -> Vec<(f64, usize)> {
        let merged = self.merged();
        let scale = merged.iter().map(|x| x.abs()).fold(1.0f64, f64::max);
        let gap = DEGENERACY_GAP * scale;
        let mut out: Vec<(f64, usize)> = Vec::new();
        for v in merged {
            match out.last_mut() {
                Some((val, m)) if (v - *val).abs() <= gap => *m += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    /// CSV rows: `gamma_index,block,eigenvalue,multiplicity`.
    pub fn to_csv(&self, gamma_index: usize) -> String {
        let mut s = String::new();
        for b in &self.blocks {
            let mut i = 0;
            let scale = b.eigenvalues.iter().map(|x| x.abs()).fold(1.0f64, f64::max);
            while i < b.eigenvalues.len() {
                let v = b.eigenvalues[i];
                let mut m = 1;
                while i + m < b.eigenvalues.len()
                    && (b.eigenvalues[i + m] - v).abs() <= DEGENERACY_GAP * scale
                {
                    m += 1;
                }
                s.push_str(&format!("{},{},{},{}\n", gamma_index, b.level, v, m));
                i += m;
            }
        }
        s
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    pub report_a: String,
    pub report_b: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: bool,
    pub matched: usize,
}

/// Orthogonal `T` with `T J T^T = J'`, built from canonical 2x2-block
/// decompositions of both matrices. Requires equal singular value multisets.
pub fn find_conjugator(j: &DMatrix<f64>, j_prime: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let k = j.nrows();
    if j_prime.nrows() != k || j.ncols() != k || j_prime.ncols() != k {
        return Err(CoreError::DimensionMismatch {
            expected: k,
            got: j_prime.nrows(),
        });
    }
    let (u, lam) = canonical_frame(j)?;
    let (u2, lam2) = canonical_frame(j_prime)?;
    let gap: f64 = lam
        .iter()
        .zip(&lam2)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = lam.iter().cloned().fold(1.0f64, f64::max);
    if lam.len() != lam2.len() || gap > 1e-8 * scale {
        return Err(CoreError::NoConjugator(gap));
    }
    let t = &u2 * u.transpose();
    let id = DMatrix::<f64>::identity(k, k);
    let orth_res = (&t * t.transpose() - &id).amax();
    let conj_res = (&t * j * t.transpose() - j_prime).amax();
    if orth_res > 1e-10 || conj_res > 1e-10 * scale.max(1.0) {
        return Err(CoreError::EigenFailure(format!(
            "canonical conjugation failed: orth {orth_res:.2e}, conj {conj_res:.2e}"
        )));
    }
    Ok(t)
}

/// Orthogonal frame in which the skew matrix takes the canonical block
/// form, together with the per-column rates (descending, paired).
fn canonical_frame(j: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let k = j.nrows();
    let s = j.transpose() * j;
    let s = (&s + s.transpose()) * 0.5;
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let scale = eig.eigenvalues.amax().max(1e-300);
    let mut u = DMatrix::<f64>::zeros(k, k);
    let mut rates = Vec::with_capacity(k);
    let mut col = 0usize;
    let mut span: Vec<DVector<f64>> = Vec::new();
    for &c in &order {
        if col >= k {
            break;
        }
        let lam2 = eig.eigenvalues[c];
        let mut v = eig.eigenvectors.column(c).clone_owned();
        for s in &span {
            let d = s.dot(&v);
            v -= s * d;
        }
        let n = v.norm();
        if n < 1e-8 {
            continue; // captured by an earlier pair
        }
        v /= n;
        // deterministic sign
        let mut best = 0;
        for i in 1..k {
            if v[i].abs() > v[best].abs() + 1e-14 {
                best = i;
            }
        }
        if v[best] < 0.0 {
            v = -v;
        }
        if lam2 <= 1e-20 * scale {
            // kernel column
            u.set_column(col, &v);
            rates.push(0.0);
            span.push(v);
            col += 1;
        } else {
            let lam = lam2.sqrt();
            let w = (j * &v) / lam;
            u.set_column(col, &v);
            u.set_column(col + 1, &w);
            rates.push(lam);
            rates.push(lam);
            span.push(v);
            span.push(w);
            col += 2;
        }
    }
    if col != k {
        return Err(CoreError::EigenFailure(
            "canonical frame construction stalled".to_string(),
        ));
    }
    Ok((u, rates))
}

/// Eigenvalues of every Hermite block of `Box_gamma` up to `max_level`.
pub fn box_spectrum(
    space: &EndomorphismSpace,
    gamma: &DVector<f64>,
    max_level: usize,
    space_id: &str,
) -> Result<SpectrumReport> {
    let spec = HermiteBasisSpec::for_gamma(space.k, gamma, max_level)?;
    let mut blocks = Vec::with_capacity(max_level + 1);
    for level in 0..=max_level {
        let a = box_block(space, gamma, &spec, level)?;
        let vals = linalg::eigvalsh(&a)?;
        blocks.push(BlockSpectrum {
            level,
            eigenvalues: vals,
        });
    }
    Ok(SpectrumReport {
        space_id: space_id.to_string(),
        gamma: gamma.iter().copied().collect(),
        method: SpectrumMethod::HermiteBlock,
        truncation_level: max_level,
        blocks,
        notes: Vec::new(),
    })
}

/// Independent route for `k = 2`: dense finite-difference discretization of
/// `Box_gamma` on a uniform grid, top of the spectrum by Lanczos iteration,
/// with one Richardson level in the grid spacing.
pub fn box_top_eigenvalue_grid(
    space: &EndomorphismSpace,
    gamma: &DVector<f64>,
    half_width: f64,
    n_coarse: usize,
) -> Result<f64> {
    if space.k != 2 {
        return Err(CoreError::Unsupported(
            "the grid oracle is implemented for k = 2".to_string(),
        ));
    }
    let n_fine = 2 * n_coarse - 1; // h -> h/2
    let e1 = grid_top(space, gamma, half_width, n_coarse)?;
    let e2 = grid_top(space, gamma, half_width, n_fine)?;
    Ok((4.0 * e2 - e1) / 3.0)
}

fn grid_top(
    space: &EndomorphismSpace,
    gamma: &DVector<f64>,
    half_width: f64,
    n: usize,
) -> Result<f64> {
    let h = 2.0 * half_width / (n as f64 - 1.0);
    let g = gamma.norm();
    let j = space.j_of(gamma)?;
    let coords: Vec<f64> = (0..n).map(|i| -half_width + i as f64 * h).collect();
    let total = n * n;
    let idx = |ix: usize, iy: usize| ix * n + iy;

    // matvec of the discretized operator (Dirichlet boundary)
    let apply = |v: &[Complex64], out: &mut [Complex64]| {
        for ix in 0..n {
            let x1 = coords[ix];
            for iy in 0..n {
                let x2 = coords[iy];
                let i = idx(ix, iy);
                let c = v[i];
                // Laplacian
                let mut acc = c * (-4.0 / (h * h));
                if ix > 0 {
                    acc += v[idx(ix - 1, iy)] / (h * h);
                }
                if ix + 1 < n {
                    acc += v[idx(ix + 1, iy)] / (h * h);
                }
                if iy > 0 {
                    acc += v[idx(ix, iy - 1)] / (h * h);
                }
                if iy + 1 < n {
                    acc += v[idx(ix, iy + 1)] / (h * h);
                }
                // 2 pi i D_gamma: (J X) . grad with centered differences
                let w1 = j[(0, 0)] * x1 + j[(0, 1)] * x2;
                let w2 = j[(1, 0)] * x1 + j[(1, 1)] * x2;
                let mut d = Complex64::new(0.0, 0.0);
                if w1 != 0.0 {
                    let up = if ix + 1 < n {
                        v[idx(ix + 1, iy)]
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    let dn = if ix > 0 {
                        v[idx(ix - 1, iy)]
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    d += (up - dn) * (w1 / (2.0 * h));
                }
                if w2 != 0.0 {
                    let up = if iy + 1 < n {
                        v[idx(ix, iy + 1)]
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    let dn = if iy > 0 {
                        v[idx(ix, iy - 1)]
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    d += (up - dn) * (w2 / (2.0 * h));
                }
                acc += d * Complex64::new(0.0, 2.0 * PI);
                // potential
                let r2 = x1 * x1 + x2 * x2;
                acc -= c * (4.0 * PI * PI * g * g * (1.0 + 0.25 * r2));
                out[i] = acc;
            }
        }
    };

    // Lanczos with full reorthogonalization; the extremal Ritz value at the
    // top converges long before the interior
    let m = 140.min(total);
    let mut qs: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    // deterministic start vector
    let mut q = vec![Complex64::new(0.0, 0.0); total];
    for (i, qi) in q.iter_mut().enumerate() {
        let t = (i as f64 * 0.61803398875).fract() - 0.5;
        *qi = Complex64::new(1.0 + t, 0.3 * t);
    }
    normalize(&mut q);
    let mut w = vec![Complex64::new(0.0, 0.0); total];
    for it in 0..m {
        apply(&q, &mut w);
        let a = dotc(&q, &w).re;
        alpha.push(a);
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi -= qi * a;
        }
        if it > 0 {
            let b = beta[it - 1];
            for (wi, qi) in w.iter_mut().zip(&qs[it - 1]) {
                *wi -= qi * b;
            }
        }
        // full reorthogonalization
        for prev in &qs {
            let c = dotc(prev, &w);
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= pi * c;
            }
        }
        let c = dotc(&q, &w);
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi -= qi * c;
        }
        let b = norm(&w);
        qs.push(q.clone());
        if b < 1e-12 {
            break;
        }
        beta.push(b);
        for (qi, wi) in q.iter_mut().zip(&w) {
            *qi = wi / b;
        }
    }
    let steps = alpha.len();
    let mut t = DMatrix::<f64>::zeros(steps, steps);
    for i in 0..steps {
        t[(i, i)] = alpha[i];
        if i + 1 < steps {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    Ok(eig.eigenvalues.max())
}

fn dotc(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(a: &mut [Complex64]) {
    let n = norm(a);
    for x in a {
        *x /= n;
    }
}

/// Pairwise sorted-eigenvalue comparison at equal truncation and method.
pub fn compare_spectra(
    a: &SpectrumReport,
    b: &SpectrumReport,
    tol: f64,
) -> Result<ComparisonVerdict> {
    if a.truncation_level != b.truncation_level || a.method != b.method {
        return Err(CoreError::InvalidComparison(
            "truncation level or method differ".to_string(),
        ));
    }
    let ma = a.merged();
    let mb = b.merged();
    if ma.len() != mb.len() {
        return Err(CoreError::InvalidComparison(format!(
            "level counts differ: {} vs {}",
            ma.len(),
            mb.len()
        )));
    }
    let scale = ma.iter().map(|x| x.abs()).fold(1.0f64, f64::max);
    let max_residual = ma
        .iter()
        .zip(&mb)
        .map(|(x, y)| (x - y).abs() / scale)
        .fold(0.0f64, f64::max);
    Ok(ComparisonVerdict {
        report_a: a.space_id.clone(),
        report_b: b.space_id.clone(),
        max_residual,
        tolerance: tol,
        verdict: max_residual <= tol,
        matched: ma.len(),
    })
}

/// Union of `Box_{Z_gamma}` spectra over nonzero lattice vectors inside the
/// truncation radius. The `gamma = 0` component (continuous X-spectrum on
/// `R^k`) is excluded and flagged in the notes.
pub fn torus_bundle_spectrum(
    space: &EndomorphismSpace,
    lattice_basis: &[DVector<f64>],
    max_level: usize,
    truncation_radius: f64,
    space_id: &str,
) -> Result<Vec<SpectrumReport>> {
    let l = space.l;
    if lattice_basis.len() != l {
        return Err(CoreError::DimensionMismatch {
            expected: l,
            got: lattice_basis.len(),
        });
    }
    let mut m = DMatrix::<f64>::zeros(l, l);
    for (c, v) in lattice_basis.iter().enumerate() {
        m.set_column(c, v);
    }
    let svd = m.clone().svd(false, false);
    let smin = svd.singular_values.min();
    if smin < 1e-10 {
        return Err(CoreError::InvalidArgument(
            "degenerate lattice basis".to_string(),
        ));
    }
    // coefficient bound: |c| <= R / smin per axis
    let bound = (truncation_radius / smin).floor() as i64;
    let mut gammas: Vec<DVector<f64>> = Vec::new();
    let mut coef = vec![-bound; l];
    'outer: loop {
        let mut g = DVector::<f64>::zeros(l);
        for (c, v) in coef.iter().zip(lattice_basis) {
            g += v * (*c as f64);
        }
        if g.norm() > 0.0 && g.norm() <= truncation_radius {
            gammas.push(g);
        }
        let mut d = 0;
        loop {
            coef[d] += 1;
            if coef[d] <= bound {
                break;
            }
            coef[d] = -bound;
            d += 1;
            if d == l {
                break 'outer;
            }
        }
    }
    // canonical order: by norm, then lexicographic
    gammas.sort_by(|a, b| {
        a.norm().partial_cmp(&b.norm()).unwrap().then_with(|| {
            for i in 0..l {
                match a[i].partial_cmp(&b[i]).unwrap() {
                    std::cmp::Ordering::Equal => continue,
                    o => return o,
                }
            }
            std::cmp::Ordering::Equal
        })
    });
    let mut out = Vec::with_capacity(gammas.len());
    for g in &gammas {
        let mut rep = box_spectrum(space, g, max_level, space_id)?;
        rep.notes
            .push("gamma = 0 component excluded: continuous spectrum on R^k".to_string());
        out.push(rep);
    }
    Ok(out)
}
