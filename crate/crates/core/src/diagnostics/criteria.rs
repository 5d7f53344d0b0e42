//! Specialized compactness criteria for harmonic, decoupled and planar
//! polynomial-times-continuous symbols.

use super::slices::require_continuous;
use crate::error::{Error, Result};
use crate::opexpr::{OpProduct, OperatorExpr};
use crate::rational::crat_one;
use crate::symbols::{boundary_face_max, BoundaryGrid, PolyZZbar, SymbolExpr, UniSum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Grid-sampled boundary values below this count as zero.
pub const FACE_ZERO_TOL: f64 = 1e-12;
/// Random interior trials when looking for a point where a product is nonzero.
pub const WITNESS_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionVerdict {
    Compact,
    NotCompact,
    /// Boundary vanishing fails, so the operator is compact only if it is zero.
    NotCompactUnlessZero,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub verdict: CriterionVerdict,
    pub evidence: Vec<String>,
}

/// `T_f T_g` with `f`, `g` pluriharmonic in each variable separately:
/// compact exactly when `fg` vanishes on every face `{|z_k| = 1}`.
pub fn harmonic_slice_criterion(f: &PolyZZbar, g: &PolyZZbar) -> Result<CriterionOutcome> {
    let n = f.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
    }
    if n < 2 {
        return Err(Error::Refusal("the harmonic slice criterion needs n >= 2".into()));
    }
    for (name, p) in [("f", f), ("g", g)] {
        if let Some(j) = p.first_non_harmonic() {
            return Err(Error::Refusal(format!(
                "{name} is not n-harmonic: the Laplacian in z{j} of {name} is {}",
                p.laplacian(j)
            )));
        }
    }
    let fg = f.mul(g);
    let mut evidence = Vec::new();
    let mut all = true;
    for k in 1..=n {
        let v = fg.vanishes_on_face(k)?;
        all &= v;
        evidence.push(format!("fg {} on the face |z{k}| = 1", if v { "vanishes" } else { "does not vanish" }));
    }
    let verdict = if all { CriterionVerdict::Compact } else { CriterionVerdict::NotCompact };
    Ok(CriterionOutcome { verdict, evidence })
}

fn random_disc_point(rng: &mut ChaCha8Rng) -> Complex64 {
    let r: f64 = rng.gen::<f64>().sqrt();
    let theta: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(r * (1.0 - 1e-9), theta)
}

/// `prod_k T_{f_k}` with every `f_k` a pure tensor `prod_j f_{j,k}(z_j)`.
/// `F = prod_k f_k` splits into per-variable products `P_j`; `F = 0` on the
/// boundary exactly when every `P_j` vanishes on the unit circle (given `F`
/// is not identically zero), which is decided exactly from the Laurent
/// coefficients on the circle.
pub fn decoupled_criterion(factors: &[SymbolExpr], seed: u64) -> Result<CriterionOutcome> {
    let Some(first) = factors.first() else {
        return Err(Error::Invalid("no factors".into()));
    };
    let n = first.dim();
    require_continuous(factors.iter(), "the decoupled criterion")?;
    let mut split: Vec<Vec<UniSum>> = Vec::with_capacity(factors.len());
    for (i, f) in factors.iter().enumerate() {
        if f.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.dim() });
        }
        split.push(f.tensor_factors().ok_or(Error::NotTensor(i + 1))?);
    }
    let per_var: Vec<Vec<UniSum>> = (0..n).map(|j| split.iter().map(|fs| fs[j].clone()).collect()).collect();
    let products: Vec<UniSum> = per_var.iter().map(|us| us.iter().fold(UniSum::one(), |acc, u| acc.mul(u))).collect();

    let mut evidence = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut witness = Vec::with_capacity(n);
    for (j, us) in per_var.iter().enumerate() {
        if products[j].is_zero() {
            evidence.push(format!("P{} = prod_k f_(k,{}) is identically zero, so F is identically zero", j + 1, j + 1));
            evidence.push("boundary vanishing of an identically zero F does not decide compactness".into());
            return Ok(CriterionOutcome { verdict: CriterionVerdict::Inconclusive, evidence });
        }
        let nonzero = |z: Complex64| us.iter().all(|u| u.eval(z).norm() > FACE_ZERO_TOL);
        let found = std::iter::once(Complex64::new(0.0, 0.0))
            .chain((0..WITNESS_TRIALS).map(|_| random_disc_point(&mut rng)))
            .find(|&z| nonzero(z));
        match found {
            Some(z) => witness.push(z),
            None => {
                evidence.push(format!(
                    "no interior point with every factor in z{} nonzero after {WITNESS_TRIALS} trials",
                    j + 1
                ));
                return Ok(CriterionOutcome { verdict: CriterionVerdict::Inconclusive, evidence });
            }
        }
    }
    let coords: Vec<String> = witness.iter().map(|z| format!("({:.6}, {:.6})", z.re, z.im)).collect();
    evidence.push(format!("F is not identically zero: every factor is nonzero at q = [{}]", coords.join(", ")));

    let mut all = true;
    for (j, p) in products.iter().enumerate() {
        let v = p.circle_laurent().is_empty();
        all &= v;
        evidence.push(format!("P{} {} on the unit circle", j + 1, if v { "vanishes" } else { "does not vanish" }));
    }
    let verdict = if all {
        evidence.push("F = 0 on the boundary and F is not identically zero, so T is compact".into());
        CriterionVerdict::Compact
    } else {
        evidence.push("F does not vanish on the boundary, so T is not compact unless T = 0".into());
        CriterionVerdict::NotCompactUnlessZero
    };
    Ok(CriterionOutcome { verdict, evidence })
}

/// `T_{f_1} ... T_{f_M} T_h T_{g_1} ... T_{g_N}` on the bidisc with polynomial
/// `f_i`, `g_i` and continuous `h`: compact exactly when the pointwise product
/// vanishes on both faces. On each face either a polynomial factor vanishes
/// identically or `h` must.
pub fn polynomial_criterion(fs: &[PolyZZbar], h: &SymbolExpr, gs: &[PolyZZbar]) -> Result<CriterionOutcome> {
    if h.dim() != 2 || fs.iter().chain(gs).any(|p| p.dim() != 2) {
        return Err(Error::Refusal(
            "the polynomial criterion is only available on the bidisc (n = 2); beyond the disc lemma the question is open".into(),
        ));
    }
    require_continuous(std::iter::once(h), "the polynomial criterion")?;
    let grid = BoundaryGrid::default();
    let mut evidence = Vec::new();
    let mut all = true;
    for k in 1..=2 {
        let mut killed = None;
        for (name, p) in fs.iter().map(|p| ("f", p)).chain(gs.iter().map(|p| ("g", p))) {
            if p.vanishes_on_face(k)? {
                killed = Some(format!("polynomial factor {name} = {p} vanishes on the face |z{k}| = 1"));
                break;
            }
        }
        let line = match killed {
            Some(line) => line,
            None => {
                let m = boundary_face_max(h, k, &grid);
                let v = m < FACE_ZERO_TOL;
                all &= v;
                format!(
                    "no polynomial factor vanishes on |z{k}| = 1; sampled max |h| there is {m:e}, h {}",
                    if v { "vanishes" } else { "does not vanish" }
                )
            }
        };
        evidence.push(line);
    }
    let verdict = if all { CriterionVerdict::Compact } else { CriterionVerdict::NotCompact };
    Ok(CriterionOutcome { verdict, evidence })
}

/// The operator `T_{f_1} ... T_{f_M} T_h T_{g_1} ... T_{g_N}` that
/// [`polynomial_criterion`] speaks about.
pub fn polynomial_operator(fs: &[PolyZZbar], h: &SymbolExpr, gs: &[PolyZZbar]) -> Result<OperatorExpr> {
    let mut factors: Vec<SymbolExpr> = fs.iter().map(PolyZZbar::to_symbol).collect();
    factors.push(h.clone());
    factors.extend(gs.iter().map(PolyZZbar::to_symbol));
    OperatorExpr::new(h.dim(), vec![OpProduct { coeff: crat_one(), factors }])
}
