//! Toeplitz operators on the Bergman space of the unit polydisc: truncated
//! matrix models, Berezin transforms and compactness diagnostics.

pub mod basis;
pub mod berezin;
pub mod catalog;
pub mod diagnostics;
pub mod error;
pub mod grammar;
pub mod opexpr;
pub mod quadops;
pub mod rational;
pub mod symbols;
pub mod toeplitz;

pub use basis::{CoefVector, MultiIndex, Point, Truncation};
pub use error::{Error, Result};
pub use grammar::{parse_operator, parse_symbol};
pub use opexpr::{OpProduct, OperatorExpr};
pub use symbols::{PiecewiseRadial, PolyZZbar, SymbolExpr};
pub use num_complex::Complex64;
pub use rational::{CRat, Rat};
