//! Restriction slices: `sum_j prod_i T(R_{k, xi} f_ji)` on `n - 1` variables.

use crate::basis::Truncation;
use crate::error::{Error, Result};
use crate::opexpr::OperatorExpr;
use crate::rational::{crat_to_c64, rat_to_f64, CRat};
use crate::symbols::SymbolExpr;
use crate::toeplitz::{assemble_exact_tensor, assemble_quadrature_tensor, AssemblyMode, ExactTensorOperator, TensorOperator};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Entry-by-entry exact zero checks stop above this many term-entry products.
const EXACT_ZERO_BUDGET: usize = 4_000_000;
const NORM_TOL: f64 = 1e-12;
const NORM_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceVerdict {
    /// Restricted coordinate, 1-based.
    pub k: usize,
    pub xi_re: f64,
    pub xi_im: f64,
    pub norm: f64,
    /// The slice operator is zero in exact arithmetic at this truncation.
    pub exact_zero: bool,
    /// Padding covers every degree shift, so the computed matrix is the exact
    /// compression of the slice operator and `norm` is a lower bound for its norm.
    pub certified: bool,
}

impl SliceVerdict {
    pub fn xi(&self) -> Complex64 {
        Complex64::new(self.xi_re, self.xi_im)
    }
}

/// Equispaced points `exp(2 pi i j / count)` on the unit circle.
pub fn equispaced_xi(count: usize) -> Vec<Complex64> {
    (0..count).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / count as f64)).collect()
}

pub(crate) fn require_continuous<'a>(symbols: impl Iterator<Item = &'a SymbolExpr>, what: &str) -> Result<()> {
    for f in symbols {
        if let Some((j, r)) = f.discontinuities().first() {
            return Err(Error::Refusal(format!(
                "{what} requires symbols continuous up to the boundary; {f} jumps in variable {j} at r = {}",
                rat_to_f64(r)
            )));
        }
    }
    Ok(())
}

/// Laurent coefficients in `xi` of the slice operator on coordinate `k`.
struct SliceLaurent {
    exact: BTreeMap<i64, ExactTensorOperator>,
    float: BTreeMap<i64, TensorOperator>,
    exact_zero: bool,
    certified: bool,
}

fn laurent_product<T: Clone>(
    acc: BTreeMap<i64, T>,
    factor: &BTreeMap<i64, T>,
    compose: impl Fn(&T, &T) -> Result<T>,
    add: impl Fn(&T, &T) -> Result<T>,
) -> Result<BTreeMap<i64, T>> {
    let mut out: BTreeMap<i64, T> = BTreeMap::new();
    for (d1, a) in &acc {
        for (d2, b) in factor {
            let c = compose(a, b)?;
            let d = d1 + d2;
            let next = match out.get(&d) {
                Some(prev) => add(prev, &c)?,
                None => c,
            };
            out.insert(d, next);
        }
    }
    Ok(out)
}

fn slice_laurent(expr: &OperatorExpr, k: usize, trunc: &Truncation, pad: usize, mode: AssemblyMode) -> Result<SliceLaurent> {
    let sub = trunc.without(k - 1)?;
    let big = sub.padded(pad);
    let mut exact: BTreeMap<i64, ExactTensorOperator> = BTreeMap::new();
    let mut float: BTreeMap<i64, TensorOperator> = BTreeMap::new();
    let mut needed = 0usize;
    for p in expr.products() {
        let restricted = p.factors.iter().map(|f| f.restrict_laurent(k)).collect::<Result<Vec<_>>>()?;
        // A factor whose restriction vanishes kills the whole product.
        if restricted.iter().any(BTreeMap::is_empty) {
            continue;
        }
        needed = needed.max(restricted.iter().map(|l| l.values().map(SymbolExpr::max_shift).max().unwrap_or(0)).sum());

        let mut e_acc = BTreeMap::from([(0i64, ExactTensorOperator::identity(big.clone()))]);
        for l in &restricted {
            let ops = l.iter().map(|(d, s)| Ok((*d, assemble_exact_tensor(s, &big)?))).collect::<Result<BTreeMap<_, _>>>()?;
            e_acc = laurent_product(e_acc, &ops, |a, b| a.compose(b), |a, b| a.add(b))?;
        }
        for (d, op) in e_acc {
            let op = op.scale(&p.coeff);
            let next = match exact.remove(&d) {
                Some(prev) => prev.add(&op)?,
                None => op,
            };
            exact.insert(d, next);
        }

        if let AssemblyMode::Quadrature { q_r } = mode {
            let mut f_acc = BTreeMap::from([(0i64, TensorOperator::identity(big.clone()))]);
            for l in &restricted {
                let ops =
                    l.iter().map(|(d, s)| Ok((*d, assemble_quadrature_tensor(s, &big, q_r)?))).collect::<Result<BTreeMap<_, _>>>()?;
                f_acc = laurent_product(f_acc, &ops, |a, b| a.compose(b), |a, b| a.add(b))?;
            }
            let c = crat_to_c64(&p.coeff);
            for (d, op) in f_acc {
                let op = op.scale(c);
                let next = match float.remove(&d) {
                    Some(prev) => prev.add(&op)?,
                    None => op,
                };
                float.insert(d, next);
            }
        }
    }
    let mut cropped = BTreeMap::new();
    for (d, op) in exact {
        let op = op.crop(&sub)?;
        if !op.is_structurally_zero() {
            cropped.insert(d, op);
        }
    }
    // `None` (too large to decide) counts as not known to be zero.
    let exact_zero = cropped.values().all(|op| op.is_exactly_zero(EXACT_ZERO_BUDGET) == Some(true));
    let float = match mode {
        AssemblyMode::Exact => cropped.iter().map(|(d, op)| (*d, op.to_float())).collect(),
        AssemblyMode::Quadrature { .. } => float.into_iter().map(|(d, op)| Ok((d, op.crop(&sub)?))).collect::<Result<_>>()?,
    };
    Ok(SliceLaurent { exact: cropped, float, exact_zero, certified: pad >= needed })
}

fn slice_at(l: &SliceLaurent, xi: Complex64, sub: &Truncation) -> Result<f64> {
    if l.exact_zero {
        return Ok(0.0);
    }
    let mut op = TensorOperator::zero(sub.clone());
    for (d, o) in &l.float {
        op = op.add(&o.scale(xi.powi(*d as i32)))?;
    }
    op.operator_norm(NORM_TOL, NORM_SEED)
}

/// Norms of the slice operators at `xi_count` equispaced points on each face.
/// Verdicts carry raw norms; thresholds are applied by the report.
pub fn restriction_slice_test(
    expr: &OperatorExpr,
    xi_count: usize,
    trunc: &Truncation,
    pad: usize,
    mode: AssemblyMode,
) -> Result<Vec<SliceVerdict>> {
    let n = expr.dim();
    if n < 2 {
        return Err(Error::Invalid("restriction slices need n >= 2".into()));
    }
    if trunc.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: trunc.dim() });
    }
    if xi_count == 0 {
        return Err(Error::Invalid("xi_count must be positive".into()));
    }
    require_continuous(expr.symbols(), "the restriction-slice criterion")?;
    let xis = equispaced_xi(xi_count);
    let mut out = Vec::with_capacity(n * xi_count);
    for k in 1..=n {
        let sub = trunc.without(k - 1)?;
        let l = slice_laurent(expr, k, trunc, pad, mode)?;
        let norms = xis.par_iter().map(|&xi| slice_at(&l, xi, &sub)).collect::<Result<Vec<_>>>()?;
        out.extend(xis.iter().zip(norms).map(|(xi, norm)| SliceVerdict {
            k,
            xi_re: xi.re,
            xi_im: xi.im,
            norm,
            exact_zero: l.exact_zero,
            certified: l.certified,
        }));
    }
    Ok(out)
}

/// Exact Laurent coefficients of the slice operator on coordinate `k`,
/// cropped to `trunc` minus slot `k`. Empty when the slice vanishes structurally.
pub fn slice_coefficients(expr: &OperatorExpr, k: usize, trunc: &Truncation, pad: usize) -> Result<BTreeMap<i64, ExactTensorOperator>> {
    Ok(slice_laurent(expr, k, trunc, pad, AssemblyMode::Exact)?.exact)
}

/// Exact slice operator at a rational unimodular point.
pub fn slice_at_exact(expr: &OperatorExpr, k: usize, xi: &CRat, trunc: &Truncation, pad: usize) -> Result<ExactTensorOperator> {
    if !crate::rational::is_unimodular(xi) {
        return Err(Error::NotUnimodular);
    }
    let sub = trunc.without(k - 1)?;
    let mut acc = ExactTensorOperator::zero(sub);
    for (d, op) in slice_coefficients(expr, k, trunc, pad)? {
        acc = acc.add(&op.scale(&crate::rational::crat_unit_pow(xi, d)))?;
    }
    Ok(acc)
}
