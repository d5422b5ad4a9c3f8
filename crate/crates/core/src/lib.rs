//! Exact computations with twisted complexes of DG bimodules over
//! finite-dimensional DG algebras.
//!
//! All arithmetic is exact, over the rationals or a prime field. Everything
//! is built on one linear solver: homotopies, lifts, quasi-inverses and
//! comparison maps are all found by [`exactalg::solve_affine`] and come back
//! as [`witness::Witness`] values that re-check themselves by substitution.

pub mod adjunction;
pub mod dgalg;
pub mod error;
pub mod exactalg;
pub mod pfunctor;
pub mod postnikov;
pub mod report;
pub mod sample;
pub mod twisted;
pub mod witness;

pub use error::{Error, Result};
