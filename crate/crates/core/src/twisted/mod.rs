//! One-sided twisted complexes of bimodules, their morphisms and cones,
//! convolutions, and the homotopy solver.
//!
//! A term `E` at position `p` enters the convolution as `E[−p]`. Twisting
//! maps and morphism components are stored as raw blocks of the total map;
//! shifting never changes their matrices.

mod complex;
mod homotopy;
mod lifts;
mod morphism;
mod outer;

pub use complex::{validate_twisted, TwistedComplex};
pub use homotopy::{
    cohomology_dims, equivalence_by_joint_solve, is_contractible, is_homotopy_equivalence, null_homotopy,
    EquivalenceWitness, NullHomotopy,
};
pub use lifts::{enumerate_lifts, LiftSpace};
pub use morphism::TwistedMorphism;
pub use outer::{cone, cone_map, cone_map_with, cone_of_map, cone_outer, totalize, OuterComplex};
