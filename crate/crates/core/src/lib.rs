//! Mild solutions of the 3D viscous Boussinesq system on a periodic box.
//!
//! Fields are stored by their Fourier coefficients; the heat semigroup and
//! Duhamel integrals act exactly per mode. On top of that sit the Picard
//! fixed-point solver, randomized checks of the smoothing and product
//! estimates that drive it, and the energy functionals of the uniqueness
//! argument.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boussinesq;
pub mod error;
pub mod heat;
pub mod picard;
pub mod spectral;
pub mod uniqueness;
pub mod verify;

pub use error::{Error, Result};
