//! Chain-level constructions at a point: a G-module with Frobenius action,
//! the level-m cyclic complex, the Kahn module, and a randomized verifier
//! for the identities relating them.

mod coef;
mod cohomology;
mod kahn;
mod level;
pub mod verifier;

pub use coef::{CoefModule, FiniteModule, FrobeniusAction, Integers, LatticeModule, RationalModule};
pub use cohomology::{
    connecting_hom, cupe_homotopy_check, extension_n, is_plus_minus, level_cohomology, level_cohomology_rational,
    splitting_check, stable_invariants, CupeReport, GModule, ShortExact, SplittingReport,
    StableInvariants,
};
pub use kahn::{mu, proj, xi, KahnM};
pub use level::{
    big_delta, big_s, delta, norm, norm_colimit_value, nu, nu_inverse, r_witness, t_minus_one,
    t_plain, t_twisted, tau, tau_diagonal, LevelElement,
};

use thiserror::Error;

use crate::exactalg::AlgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("level must be at least 1")]
    InvalidLevel,
    #[error("element is not fixed by phi^{0}")]
    NotFixed(usize),
    #[error("index {j} out of range for level {m}")]
    IndexOutOfRange { j: usize, m: usize },
    #[error("operation not supported for {0} coefficients")]
    UnsupportedVariant(&'static str),
    #[error("two routes disagree for {what}: {left} vs {right}")]
    RouteMismatch {
        what: &'static str,
        left: String,
        right: String,
    },
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("map does not commute with phi: {0}")]
    NotEquivariant(String),
    #[error(transparent)]
    Alg(#[from] AlgError),
}
