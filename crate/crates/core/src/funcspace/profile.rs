//! Generator profiles `phi(|X^(a)|, |X^(b)|, V)`: an X-radial polynomial
//! factor times a finite sum of `(polynomial in |V|) * Gaussian` terms.
//!
//! The V-part is closed under the operations the intertwining identities
//! need: multiplication by powers of `|V|` and differentiation in `|V|`.

use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// `p(r) * exp(-r^2 / (2 s))` with `p` a real polynomial in `r = |V|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianTerm {
    /// variance parameter `s` of the Gaussian factor
    pub width_sq: f64,
    /// polynomial coefficients, `poly[m]` multiplying `r^m`
    pub poly: Vec<f64>,
}

impl GaussianTerm {
    pub fn eval(&self, r: f64) -> f64 {
        let mut p = 0.0;
        for c in self.poly.iter().rev() {
            p = p * r + c;
        }
        p * (-r * r / (2.0 * self.width_sq)).exp()
    }

    /// `d/dr [p e^{-r^2/2s}] = (p' - r p / s) e^{-r^2/2s}`.
    pub fn d_dr(&self) -> GaussianTerm {
        let n = self.poly.len();
        let mut out = vec![0.0; n + 1];
        for (m, c) in self.poly.iter().enumerate() {
            if m > 0 {
                out[m - 1] += m as f64 * c;
            }
            out[m + 1] -= c / self.width_sq;
        }
        GaussianTerm {
            width_sq: self.width_sq,
            poly: out,
        }
    }

    pub fn mul_r_pow(&self, m: usize) -> GaussianTerm {
        let mut out = vec![0.0; self.poly.len() + m];
        for (i, c) in self.poly.iter().enumerate() {
            out[i + m] = *c;
        }
        GaussianTerm {
            width_sq: self.width_sq,
            poly: out,
        }
    }

    pub fn scaled(&self, c: f64) -> GaussianTerm {
        GaussianTerm {
            width_sq: self.width_sq,
            poly: self.poly.iter().map(|x| x * c).collect(),
        }
    }
}

/// V-radial part: a finite sum of Gaussian terms. Square-integrability in V
/// is automatic from the Gaussian factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VProfile {
    pub terms: Vec<GaussianTerm>,
}

impl VProfile {
    pub fn gaussian(width_sq: f64) -> Self {
        VProfile {
            terms: vec![GaussianTerm {
                width_sq,
                poly: vec![1.0],
            }],
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(r)).sum()
    }

    pub fn d_dr(&self) -> VProfile {
        VProfile {
            terms: self.terms.iter().map(|t| t.d_dr()).collect(),
        }
    }

    pub fn mul_r_pow(&self, m: usize) -> VProfile {
        VProfile {
            terms: self.terms.iter().map(|t| t.mul_r_pow(m)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> VProfile {
        VProfile {
            terms: self.terms.iter().map(|t| t.scaled(c)).collect(),
        }
    }

    pub fn add(&self, other: &VProfile) -> VProfile {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        VProfile { terms }
    }

    /// Largest Gaussian width, used to place the radial truncation.
    pub fn max_width(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.width_sq.sqrt())
            .fold(0.0, f64::max)
    }
}

/// X-radial factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum XProfile {
    /// polynomial in `r = |X|`; `One` is the common case
    RadialPoly(Vec<f64>),
    /// sum of `c * |X^(a)|^(2m) * |X^(b)|^(2n)` terms
    SplitPoly(Vec<(u32, u32, f64)>),
}

impl XProfile {
    pub fn one() -> Self {
        XProfile::RadialPoly(vec![1.0])
    }

    pub fn is_constant(&self) -> bool {
        match self {
            XProfile::RadialPoly(p) => p.len() <= 1,
            XProfile::SplitPoly(t) => t.iter().all(|(m, n, _)| *m == 0 && *n == 0),
        }
    }

    pub fn eval(&self, xa_norm: f64, xb_norm: f64) -> f64 {
        match self {
            XProfile::RadialPoly(p) => {
                let r = (xa_norm * xa_norm + xb_norm * xb_norm).sqrt();
                let mut acc = 0.0;
                for c in p.iter().rev() {
                    acc = acc * r + c;
                }
                acc
            }
            XProfile::SplitPoly(t) => t
                .iter()
                .map(|(m, n, c)| c * xa_norm.powi(2 * *m as i32) * xb_norm.powi(2 * *n as i32))
                .sum(),
        }
    }
}

/// The generator profile of a twisted Z-Fourier function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorProfile {
    pub xpart: XProfile,
    pub vpart: VProfile,
}

impl GeneratorProfile {
    /// The standard test profile: `phi(V) = exp(-|V|^2 / 2)`, X-part 1.
    pub fn standard_gaussian() -> Self {
        GeneratorProfile {
            xpart: XProfile::one(),
            vpart: VProfile::gaussian(1.0),
        }
    }

    pub fn with_width(width_sq: f64) -> Self {
        GeneratorProfile {
            xpart: XProfile::one(),
            vpart: VProfile::gaussian(width_sq),
        }
    }

    pub fn eval(&self, xa_norm: f64, xb_norm: f64, v_norm: f64) -> f64 {
        self.xpart.eval(xa_norm, xb_norm) * self.vpart.eval(v_norm)
    }

    /// The profile must be X-independent for the radial transforms the
    /// boundary checks use.
    pub fn require_constant_xpart(&self) -> Result<()> {
        if self.xpart.is_constant() {
            Ok(())
        } else {
            Err(CoreError::Unsupported(
                "this transform needs a profile depending on V only".to_string(),
            ))
        }
    }
}
