//! Numerical laboratory for the Landau–Pekar equations and the many-body
//! Fröhlich model in a mean-field scaling.
//!
//! * [`spectral`] : periodic lattices, the Fourier pair and the form factors.
//! * [`landau_pekar`] : split-step integrator for the coupled condensate /
//!   classical phonon field equations.
//! * [`fock`] : exact dynamics of the truncated Fock-space Fröhlich model,
//!   Weyl and Gross transforms, reduced densities and the β functionals.
//! * [`bounds`] : numerical checks of the identities and operator
//!   inequalities used to control the mean-field approximation.

pub mod bounds;
pub mod error;
pub mod fock;
pub mod landau_pekar;
pub mod linalg;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
