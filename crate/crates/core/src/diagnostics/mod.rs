//! Compactness diagnostics: restriction slices, Berezin decay, the
//! specialized criteria, and reproduction of the worked examples.

mod criteria;
mod decay;
mod examples;
mod lemma;
mod report;
mod slices;

pub use criteria::{
    decoupled_criterion, harmonic_slice_criterion, polynomial_criterion, polynomial_operator, CriterionOutcome,
    CriterionVerdict, FACE_ZERO_TOL, WITNESS_TRIALS,
};
pub use decay::{decay_test, default_targets, is_obstruction, DecayOutcome, DecayVerdict, FLAT_RATIO};
pub use examples::{build_examples, reproduce_examples, Claim, ExampleBundle};
pub use lemma::{lemma_limit_probe, localization_defect};
pub use report::{analyze, pointwise_symbol, CompactnessReport, DiagnosticsConfig, FaceMax, Tolerances, Verdict};
pub use slices::{equispaced_xi, restriction_slice_test, slice_at_exact, slice_coefficients, SliceVerdict};

#[cfg(test)]
mod tests;
