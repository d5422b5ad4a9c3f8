//! DG algebras, DG bimodules, bimodule maps, Hom complexes and strict tensor products.

mod algebra;
mod bimodule;
mod ctx;
mod hom;
mod map;
mod system;
mod tensor;

pub use algebra::{validate_algebra, BasisElement, DGAlgebra};
pub use bimodule::{same_algebra, validate_bimodule, verify_semifree, Bimodule, Side};
pub use ctx::{linear_combination, Ctx, Segment};
pub use hom::{hom_degree_range, HomComplex, HomSpace};
pub use map::{hom_differential, BimoduleMap};
pub use system::{Equation, Solution, System, Unknown};
pub use tensor::{TensorProduct, Word};
