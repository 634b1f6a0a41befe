//! Symbolic and numerical differential operators: the Euclidean and full
//! Laplacians, directional derivatives, compound angular momentum, harmonic
//! projection, and Zeeman operator blocks in a Hermite basis.

pub mod conventions;
mod hermite;
mod stencil;
mod symbolic;

pub use hermite::{
    basis_function, box_block, box_blocks, hermite_function, level_indices, HermiteBasisSpec,
};
pub use stencil::{
    d_v, delta_x, delta_x_spherical, delta_z, delta_z_spherical, full_laplacian, m_operator,
    partial2_z, partial_x, partial_z, radial2_x, radial2_z, radial_x, radial_z, Evaluable,
    StencilSpec,
};
pub use symbolic::{
    apply_d_v, apply_delta_x, derivative_along_field, harmonic_coeffs, harmonic_projection,
};
