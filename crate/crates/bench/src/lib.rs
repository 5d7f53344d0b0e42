//! Fixtures shared by the benchmarks.

use bergman_core::catalog::{bidisc_defining, phi, psi};
use bergman_core::{OperatorExpr, Truncation};

/// `T_phi(w) T_(phi(z) + psi(w))`, the boundary-only example.
pub fn boundary_example() -> OperatorExpr {
    OperatorExpr::product(vec![phi(2, 2), phi(2, 1).add(&psi(2, 2))]).expect("same dimension")
}

pub fn defining_operator() -> OperatorExpr {
    OperatorExpr::toeplitz(bidisc_defining())
}

pub fn bidisc(cap: usize) -> Truncation {
    Truncation::uniform(2, cap).expect("positive cap")
}
