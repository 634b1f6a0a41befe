//! Clifford modules, H-type and general 2-step nilpotent endomorphism
//! spaces, sigma-deformations and perturbations.

mod clifford;
mod endo;

pub use clifford::{build_irreducible_clifford, perturb_clifford, CliffordModule};
pub use endo::{
    assemble_h_type, normalized_endomorphism, sigma_deform, sigma_from_partition,
    EndomorphismSpace, NormalizedEndomorphism, SigmaInvolution, SpaceTag, KERNEL_RELATIVE_CUTOFF,
};

use crate::Result;

/// Convenience: build `H^{(a,b)}_l` in one call.
pub fn h_type_space(l: usize, a: usize, b: usize) -> Result<EndomorphismSpace> {
    let module = build_irreducible_clifford(l)?;
    assemble_h_type(&module, a, b)
}

/// Convenience: build the perturbed space with the same `(a, b)` pattern.
pub fn perturbed_h_type_space(
    l: usize,
    a: usize,
    b: usize,
    eps: f64,
    seed: u64,
) -> Result<EndomorphismSpace> {
    let module = build_irreducible_clifford(l)?;
    let perturbed = perturb_clifford(&module, eps, seed)?;
    assemble_h_type(&perturbed, a, b)
}
