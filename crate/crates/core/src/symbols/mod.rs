//! Symbols on the closed polydisc and the exact polynomial calculus on them.

mod boundary;
mod expr;
mod poly;
mod radial;

pub use boundary::{boundary_face_max, closed_disc_max, unit_circle, BoundaryGrid};
pub use expr::{SymbolExpr, TensorTerm, UniSum, UniTerm};
pub use poly::{Exponent, PolyZZbar, RadialForm};
pub use radial::{format_rpoly, rpoly_eval, rpoly_trim, PiecewiseRadial, RPoly, RadialPiece};
