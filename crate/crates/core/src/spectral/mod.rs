//! Periodic-box discretization: lattices, the Fourier pair, form factors and
//! their continuum norms.

pub mod fft;
pub mod form_factor;
pub mod lattice;
pub mod norms;
pub mod quadrature;

pub use fft::{forward_ft, inverse_ft, ComplexField, FourierPlan, ModeVector};
pub use form_factor::{kernel, make_form_factor, radial_profile, FormFactor, FormFactorKind};
pub use lattice::{dot3, norm3, BoxLattice};
pub use norms::{continuum_norms, ContinuumNorms};
