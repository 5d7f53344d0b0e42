//! Named symbols used by the worked examples and the test corpus.

use crate::rational::{rat, Rat};
use crate::symbols::{PiecewiseRadial, RadialPiece, SymbolExpr};
use num_traits::{One, Zero};

/// `1 - 2r` on `[0, 1/2]`, `0` beyond.
pub fn phi_profile() -> PiecewiseRadial {
    phi_profile_with_break(rat(1, 2))
}

/// The same formula with the breakpoint moved; any breakpoint other than 1/2
/// makes the profile discontinuous.
pub fn phi_profile_with_break(brk: Rat) -> PiecewiseRadial {
    PiecewiseRadial::new(vec![
        RadialPiece { lo: Rat::zero(), hi: brk.clone(), poly: vec![Rat::one(), rat(-2, 1)] },
        RadialPiece { lo: brk, hi: Rat::one(), poly: vec![] },
    ])
    .expect("valid partition")
}

/// `0` on `[0, 1/2]`, `2r - 1` beyond.
pub fn psi_profile() -> PiecewiseRadial {
    PiecewiseRadial::new(vec![
        RadialPiece { lo: Rat::zero(), hi: rat(1, 2), poly: vec![] },
        RadialPiece { lo: rat(1, 2), hi: Rat::one(), poly: vec![rat(-1, 1), rat(2, 1)] },
    ])
    .expect("valid partition")
}

/// `phi(|z_k|)` on the `n`-polydisc.
pub fn phi(n: usize, k: usize) -> SymbolExpr {
    SymbolExpr::radial(n, k, phi_profile()).expect("valid slot")
}

pub fn psi(n: usize, k: usize) -> SymbolExpr {
    SymbolExpr::radial(n, k, psi_profile()).expect("valid slot")
}

/// `(1 - |z|^2)(1 - |w|^2)`.
pub fn bidisc_defining() -> SymbolExpr {
    SymbolExpr::one_minus_mod2(2, 1)
        .unwrap()
        .mul(&SymbolExpr::one_minus_mod2(2, 2).unwrap())
}
