//! Localization near a face: `||(psi - psi_zeta) k_{p_1} h||` as `p_1 -> zeta`,
//! where `psi_zeta` is `psi` with `z_1` frozen at `zeta` and `k_{p_1}` is the
//! normalized one-variable kernel.

use super::slices::require_continuous;
use crate::basis::CoefVector;
use crate::berezin::berezin_unisum_series;
use crate::error::{Error, Result};
use crate::rational::{crat_to_c64, is_unimodular, CRat};
use crate::symbols::SymbolExpr;
use crate::toeplitz::assemble_exact_tensor;
use ndarray::Array1;
use num_complex::Complex64;

/// `|psi - psi_zeta|^2` expanded symbolically.
pub fn localization_defect(psi: &SymbolExpr, zeta: &CRat) -> Result<SymbolExpr> {
    let frozen = psi.restrict(1, zeta)?.extend(1)?;
    let d = psi.sub(&frozen);
    Ok(d.mul(&d.conj()))
}

/// Values `(t, ||(psi - psi_zeta) k_{t zeta} h||)`.
///
/// The squared norm splits over the tensor terms `c u(z_1) v(z')` of
/// `|psi - psi_zeta|^2` into `c B(u)(t zeta) <T_v h, h>`. The first factor is a
/// convergent series summed to double precision and the second is exact on
/// the span of `h`, so no sample is affected by truncation.
pub fn lemma_limit_probe(psi: &SymbolExpr, zeta: &CRat, h: &CoefVector, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = psi.dim();
    if n < 2 {
        return Err(Error::Invalid("the probe needs n >= 2".into()));
    }
    if h.trunc.dim() != n - 1 {
        return Err(Error::DimensionMismatch { expected: n - 1, got: h.trunc.dim() });
    }
    if !is_unimodular(zeta) {
        return Err(Error::NotUnimodular);
    }
    if ts.iter().any(|t| !(0.0..1.0).contains(t)) {
        return Err(Error::Invalid("probe parameters must lie in [0, 1)".into()));
    }
    require_continuous(std::iter::once(psi), "the localization probe")?;
    let defect = localization_defect(psi, zeta)?;
    let hv = Array1::from(h.coeffs.clone());
    let mut parts = Vec::with_capacity(defect.terms().len());
    for t in defect.terms() {
        let rest = SymbolExpr::tensor(t.factors[1..].to_vec());
        let a = assemble_exact_tensor(&rest, &h.trunc)?.to_float();
        let form: Complex64 = a.apply(&hv).iter().zip(hv.iter()).map(|(x, y)| x * y.conj()).sum();
        parts.push((t.factors[0].clone(), crat_to_c64(&t.coeff) * form));
    }
    let z = crat_to_c64(zeta);
    Ok(ts
        .iter()
        .map(|&t| {
            let p1 = z * t;
            let sq: Complex64 = parts.iter().map(|(u, c)| berezin_unisum_series(u, p1) * c).sum();
            (t, sq.re.max(0.0).sqrt())
        })
        .collect())
}
