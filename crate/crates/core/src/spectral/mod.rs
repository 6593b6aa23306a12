//! Fourier-coefficient fields on a periodic box and the multiplier calculus
//! acting on them.

mod field;
mod grid;
mod ops;

pub use field::{
    deterministic_reductions, set_deterministic_reductions, NormOrder, SpectralField,
    SpectralScalar, SpectralVector, DIVERGENCE_TOL,
};
pub use grid::Grid;
pub use ops::{
    dealias, dealiased_product, divergence, fractional_laplacian, from_physical,
    gen_random_field, gen_random_velocity, gradient, hdot, hnorm, lebesgue_norm, leray_project,
    sobolev_inner, sobolev_norm, to_physical,
};

pub(crate) use ops::{
    forward_dealiased, gradient_potential, inverse_batch, leray_project_in_place,
};
