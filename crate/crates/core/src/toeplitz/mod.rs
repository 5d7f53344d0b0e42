//! Truncated Toeplitz matrices on the polydisc: exact assembly for the closed
//! symbol class, a quadrature fallback, padded composition and norms.

mod band;
mod dense;
mod tensor;

pub use band::ScaledBandMatrix;
pub use dense::{kron, kronecker, power_norm, OperatorMatrix};
pub use tensor::{ExactTensorOperator, ExactTensorTerm, TensorOperator, TensorTerm};

use crate::basis::Truncation;
use crate::error::{Error, Result};
use crate::opexpr::OperatorExpr;
use crate::quadops::DiscRule;
use crate::rational::crat_to_c64;
use crate::symbols::{SymbolExpr, UniSum};
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssemblyMode {
    Exact,
    /// Composite Gauss-Legendre of order `q_r` per radial panel; the angular
    /// rule is chosen to be exact.
    Quadrature { q_r: usize },
}

/// Three-valued answer to "is this operator zero".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroVerdict {
    /// Exactly zero by structure (no surviving terms).
    Zero,
    /// A nonzero entry that padding cannot remove.
    Nonzero,
    /// Numerically small or not certified either way.
    Inconclusive,
}

fn check_dim(f: &SymbolExpr, trunc: &Truncation) -> Result<()> {
    if f.dim() != trunc.dim() {
        return Err(Error::DimensionMismatch { expected: trunc.dim(), got: f.dim() });
    }
    Ok(())
}

/// `T_f` as an exact sum of Kronecker products.
pub fn assemble_exact_tensor(f: &SymbolExpr, trunc: &Truncation) -> Result<ExactTensorOperator> {
    check_dim(f, trunc)?;
    let terms = f
        .terms()
        .iter()
        .map(|t| ExactTensorTerm {
            coeff: t.coeff.clone(),
            factors: t.factors.iter().zip(trunc.caps()).map(|(u, &c)| ScaledBandMatrix::from_unisum(u, c)).collect(),
        })
        .collect();
    Ok(ExactTensorOperator { trunc: trunc.clone(), terms })
}

/// One-variable `T_u` by quadrature: `A = V^H diag(w u) V` with `V[i][m] = sqrt(m+1) z_i^m`.
pub fn assemble_unisum_quadrature(u: &UniSum, cap: usize, q_r: usize) -> Result<Array2<Complex64>> {
    // Integrand frequencies are bounded by 2 (cap - 1) + angular degree.
    let rule = DiscRule::new(q_r, 2 * cap + u.angular_degree() + 1)?;
    let nodes = rule.nodes(&u.breakpoints_f64());
    let mut v = Array2::<Complex64>::zeros((nodes.len(), cap));
    let mut wv = Array2::<Complex64>::zeros((nodes.len(), cap));
    for (i, &(z, w)) in nodes.iter().enumerate() {
        let fw = u.eval(z) * w;
        let mut pow = Complex64::new(1.0, 0.0);
        for m in 0..cap {
            let e = pow * ((m + 1) as f64).sqrt();
            v[[i, m]] = e;
            wv[[i, m]] = e * fw;
            pow *= z;
        }
    }
    Ok(v.t().mapv(|x| x.conj()).dot(&wv))
}

pub fn assemble_quadrature_tensor(f: &SymbolExpr, trunc: &Truncation, q_r: usize) -> Result<TensorOperator> {
    check_dim(f, trunc)?;
    let terms = f
        .terms()
        .iter()
        .map(|t| {
            Ok(TensorTerm {
                coeff: crat_to_c64(&t.coeff),
                factors: t
                    .factors
                    .iter()
                    .zip(trunc.caps())
                    .map(|(u, &c)| assemble_unisum_quadrature(u, c, q_r))
                    .collect::<Result<Vec<_>>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TensorOperator { trunc: trunc.clone(), terms })
}

pub fn assemble_tensor(f: &SymbolExpr, trunc: &Truncation, mode: AssemblyMode) -> Result<TensorOperator> {
    match mode {
        AssemblyMode::Exact => Ok(assemble_exact_tensor(f, trunc)?.to_float()),
        AssemblyMode::Quadrature { q_r } => assemble_quadrature_tensor(f, trunc, q_r),
    }
}

/// Dense truncated `T_f`, entry `(l, m) = <f e_m, e_l>`.
pub fn assemble(f: &SymbolExpr, trunc: &Truncation, mode: AssemblyMode) -> Result<OperatorMatrix> {
    let a = assemble_tensor(f, trunc, mode)?.to_matrix();
    if f.is_real() {
        let bound = if mode == AssemblyMode::Exact { 0.0 } else { 1e-14 * a.max_abs().max(1.0) };
        let defect = a.hermitian_defect();
        assert!(defect <= bound, "real symbol produced a non-Hermitian matrix (defect {defect})");
    }
    Ok(a)
}

/// Default padding: the largest summed degree shift over the products, capped at 16.
pub fn default_pad(expr: &OperatorExpr) -> usize {
    expr.products()
        .iter()
        .map(|p| p.factors.iter().map(SymbolExpr::max_shift).sum::<usize>())
        .max()
        .unwrap_or(0)
        .min(16)
}

/// Exact `sum_i c_i prod_j T(f_ij)`: factors assembled at `caps + pad`,
/// multiplied in order, summed, then cropped to `trunc`.
pub fn compose_exact_tensor(expr: &OperatorExpr, trunc: &Truncation, pad: usize) -> Result<ExactTensorOperator> {
    if expr.dim() != trunc.dim() {
        return Err(Error::DimensionMismatch { expected: trunc.dim(), got: expr.dim() });
    }
    let big = trunc.padded(pad);
    let mut acc = ExactTensorOperator::zero(big.clone());
    for p in expr.products() {
        let mut prod = ExactTensorOperator::identity(big.clone());
        for f in &p.factors {
            prod = prod.compose(&assemble_exact_tensor(f, &big)?)?;
        }
        acc = acc.add(&prod.scale(&p.coeff))?;
    }
    acc.crop(trunc)
}

pub fn compose(expr: &OperatorExpr, trunc: &Truncation, pad: usize, mode: AssemblyMode) -> Result<TensorOperator> {
    if let AssemblyMode::Exact = mode {
        return Ok(compose_exact_tensor(expr, trunc, pad)?.to_float());
    }
    if expr.dim() != trunc.dim() {
        return Err(Error::DimensionMismatch { expected: trunc.dim(), got: expr.dim() });
    }
    let big = trunc.padded(pad);
    let mut acc = TensorOperator::zero(big.clone());
    for p in expr.products() {
        let mut prod = TensorOperator::identity(big.clone());
        for f in &p.factors {
            prod = prod.compose(&assemble_tensor(f, &big, mode)?)?;
        }
        acc = acc.add(&prod.scale(crat_to_c64(&p.coeff)))?;
    }
    acc.crop(trunc)
}

pub fn compose_matrix(expr: &OperatorExpr, trunc: &Truncation, pad: usize, mode: AssemblyMode) -> Result<OperatorMatrix> {
    Ok(compose(expr, trunc, pad, mode)?.to_matrix())
}

pub fn operator_norm(a: &OperatorMatrix, tol: f64) -> Result<f64> {
    if tol <= 0.0 {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    a.operator_norm(tol, 0x5eed)
}
