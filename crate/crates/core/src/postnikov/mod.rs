//! Left and right Postnikov systems of three-term complexes: induced
//! systems, lifting back to twisted complexes, conversion between the two
//! orientations, and the surjectivity test for uniqueness of convolutions.

mod lift;
mod surjectivity;
mod system;

pub use lift::{certify_conversion, comparison_to_lift, convert_system, lift_to_twisted, ConversionCertificate};
pub use surjectivity::{
    classify_complexes, classify_lifts, surjectivity_criterion, unipotent_comparison, EquivalenceReport,
    Surjectivity, Verdict,
};
pub use system::{
    induced_left_postnikov, induced_right_postnikov, left_lifted_map, right_lifted_map, validate_postnikov,
    Orientation, PostnikovSystem, ThreeTermData,
};
