//! Exact linear algebra over the integers and rationals, and the category of
//! finitely presented abelian groups.

mod group;
mod matrix;
mod normal;
pub mod random;

pub use group::{minus_one, FpGroup, FpMorphism};
pub use matrix::{IntMatrix, RatMatrix};
pub use normal::{hnf, in_lattice, integer_kernel, lattice_basis, snf, solve_integer, Hermite, Smith};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("morphism does not respect the source relations")]
    IncompatibleMorphism,
}
