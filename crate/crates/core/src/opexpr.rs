//! Finite sums of finite products of Toeplitz operators, `sum_i c_i prod_j T(f_ij)`.

use crate::error::{Error, Result};
use crate::rational::{crat_one, format_crat, is_crat_zero, CRat};
use crate::symbols::SymbolExpr;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpProduct {
    pub coeff: CRat,
    pub factors: Vec<SymbolExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorExpr {
    n: usize,
    products: Vec<OpProduct>,
}

impl OperatorExpr {
    pub fn new(n: usize, products: Vec<OpProduct>) -> Result<Self> {
        for p in &products {
            if p.factors.is_empty() {
                return Err(Error::Invalid("empty operator product".into()));
            }
            for f in &p.factors {
                if f.dim() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: f.dim() });
                }
            }
        }
        let products = products.into_iter().filter(|p| !is_crat_zero(&p.coeff)).collect();
        Ok(OperatorExpr { n, products })
    }

    /// The single operator `T(f)`.
    pub fn toeplitz(f: SymbolExpr) -> Self {
        let n = f.dim();
        OperatorExpr { n, products: vec![OpProduct { coeff: crat_one(), factors: vec![f] }] }
    }

    /// `T(f_1) T(f_2) ... T(f_m)`.
    pub fn product(factors: Vec<SymbolExpr>) -> Result<Self> {
        let n = factors.first().map(SymbolExpr::dim).ok_or_else(|| Error::Invalid("empty product".into()))?;
        Self::new(n, vec![OpProduct { coeff: crat_one(), factors }])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn products(&self) -> &[OpProduct] {
        &self.products
    }

    pub fn add(&self, other: &OperatorExpr) -> Result<OperatorExpr> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let mut products = self.products.clone();
        products.extend(other.products.iter().cloned());
        Self::new(self.n, products)
    }

    /// Every symbol that occurs in some product.
    pub fn symbols(&self) -> impl Iterator<Item = &SymbolExpr> {
        self.products.iter().flat_map(|p| p.factors.iter())
    }
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.products.is_empty() {
            return write!(f, "0*T(1)");
        }
        for (i, p) in self.products.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if p.coeff != crat_one() {
                write!(f, "{}*", format_crat(&p.coeff))?;
            }
            let parts: Vec<String> = p.factors.iter().map(|s| format!("T({s})")).collect();
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}
