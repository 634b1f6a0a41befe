//! Pole bases, generator profiles, and twisted Z-Fourier functions
//! evaluated by quadrature.

mod basis;
mod profile;
mod twisted;

pub use basis::{
    coordinates, theta, BasisAt, ChangingBasis, ConstantBasis, PoleBasis, SINGULAR_THRESHOLD,
};
pub use profile::{GaussianTerm, GeneratorProfile, VProfile, XProfile};
pub use twisted::{
    eval_sphere_fourier, eval_twisted, make_harmonic, make_one_pole, make_two_pole, Term,
    TwistedFunction, Variant,
};
