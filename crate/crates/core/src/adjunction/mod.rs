//! Homotopy adjunctions `(M ⊣ N)` given by a trace and an action, and the
//! uniqueness of convolutions of `X ⊗ M → N ⊗ M → ℬ`.

mod data;
mod random;
mod uniqueness;

pub use data::{
    dual_left_adjunction, evaluation_trace, free_adjunction, free_adjunction_on, pairing_trace, perturb_trace, solve_action, validate_adjunction,
    AdjunctionCheck, AdjunctionData,
};
pub use random::{random_adjunction, random_scenario};
pub use uniqueness::{
    build_lift_equivalence, insert_action, preimage_under_trace, validate_scenario, verify_uniqueness,
    LiftEquivalence, Mode, Preimage, UniquenessScenario,
};
