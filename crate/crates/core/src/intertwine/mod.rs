//! The intertwining operator kappa, parity decompositions, numerical
//! independence tests, and boundary-condition verification.

mod boundary;
mod independence;
mod kappa;
mod parity;

pub use boundary::{
    boundary_laplacian_check, build_z_neumann_one_pole, dirichlet_check, frame_x_derivative,
    identity_check_second_radial, identity_check_z_neumann, neumann_check, neumann_normal,
    normal_derivative, z_neumann_check, CutoffTwisted, DomainShape, NormalData, RadiusFn,
};
pub use independence::{
    independence_negative_control, independence_rank_test, IndependenceConfig, IndependenceVerdict,
};
pub use kappa::{
    apply_kappa, sample_points, verify_intertwines_laplacian, verify_mf_and_delta_zf, KappaOperator,
};
pub use parity::{kappa_signs_consistent, parity_decompose, ParityPart, ParityTag};
