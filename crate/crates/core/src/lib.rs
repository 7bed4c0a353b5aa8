//! Exact algebra for Weil-étale cohomology at desk scale: finitely presented
//! abelian groups, the level complexes of a Frobenius module, descent
//! reports, and zeta-function special values.

pub mod chainlab;
pub mod document;
pub mod exactalg;
pub mod frobmod;
pub mod poly;
pub mod weilcoh;
pub mod zetaval;

pub use exactalg::{FpGroup, FpMorphism, IntMatrix, RatMatrix};
pub use poly::PolyQ;
