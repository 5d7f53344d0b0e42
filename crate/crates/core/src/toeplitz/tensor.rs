//! Operators stored as sums of Kronecker products of one-variable matrices.
//!
//! Products of Toeplitz operators on the polydisc expand termwise, so a
//! product of tensor-structured factors stays tensor-structured and never
//! needs the full `prod N_j`-square dense matrix unless asked for.

use super::band::ScaledBandMatrix;
use super::dense::{kron, power_norm, OperatorMatrix};
use crate::basis::Truncation;
use crate::error::{Error, Result};
use crate::rational::{crat_to_c64, CRat};
use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactTensorTerm {
    pub coeff: CRat,
    pub factors: Vec<ScaledBandMatrix>,
}

/// Exact tensor-structured operator on a truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactTensorOperator {
    pub trunc: Truncation,
    pub terms: Vec<ExactTensorTerm>,
}

impl ExactTensorOperator {
    pub fn zero(trunc: Truncation) -> Self {
        ExactTensorOperator { trunc, terms: Vec::new() }
    }

    pub fn identity(trunc: Truncation) -> Self {
        let factors = trunc.caps().iter().map(|&c| ScaledBandMatrix::identity(c)).collect();
        ExactTensorOperator { trunc, terms: vec![ExactTensorTerm { coeff: crate::rational::crat_one(), factors }] }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch(format!("{:?} vs {:?}", self.trunc.caps(), other.trunc.caps())));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(ExactTensorOperator { trunc: self.trunc.clone(), terms }.merged())
    }

    pub fn scale(&self, c: &CRat) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| ExactTensorTerm { coeff: t.coeff.clone() * c.clone(), factors: t.factors.clone() })
            .collect();
        ExactTensorOperator { trunc: self.trunc.clone(), terms }.merged()
    }

    /// Operator product, expanded termwise.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for x in &self.terms {
            for y in &other.terms {
                let factors =
                    x.factors.iter().zip(&y.factors).map(|(a, b)| a.compose_exact(b)).collect::<Result<Vec<_>>>()?;
                terms.push(ExactTensorTerm { coeff: x.coeff.clone() * y.coeff.clone(), factors });
            }
        }
        Ok(ExactTensorOperator { trunc: self.trunc.clone(), terms }.merged())
    }

    pub fn crop(&self, trunc: &Truncation) -> Result<Self> {
        if trunc.dim() != self.trunc.dim() {
            return Err(Error::DimensionMismatch { expected: self.trunc.dim(), got: trunc.dim() });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| ExactTensorTerm {
                coeff: t.coeff.clone(),
                factors: t.factors.iter().zip(trunc.caps()).map(|(f, &c)| f.crop(c)).collect(),
            })
            .collect();
        Ok(ExactTensorOperator { trunc: trunc.clone(), terms }.merged())
    }

    /// Drops zero terms and merges terms whose factors agree in every slot but one.
    fn merged(mut self) -> Self {
        self.terms.retain(|t| !crate::rational::is_crat_zero(&t.coeff) && t.factors.iter().all(|f| !f.is_zero()));
        let mut out: Vec<ExactTensorTerm> = Vec::with_capacity(self.terms.len());
        'next: for t in self.terms {
            for o in out.iter_mut() {
                let differing: Vec<usize> = (0..t.factors.len()).filter(|&j| o.factors[j] != t.factors[j]).collect();
                match differing.as_slice() {
                    [] => {
                        o.coeff = o.coeff.clone() + t.coeff.clone();
                        continue 'next;
                    }
                    [j] => {
                        let j = *j;
                        // c1 A (x) ... + c2 B (x) ... = 1 * (c1 A + c2 B) (x) ...
                        let merged = o.factors[j].scale(&o.coeff).add(&t.factors[j].scale(&t.coeff)).unwrap();
                        o.factors[j] = merged;
                        o.coeff = crate::rational::crat_one();
                        continue 'next;
                    }
                    _ => {}
                }
            }
            out.push(t);
        }
        out.retain(|t| !crate::rational::is_crat_zero(&t.coeff) && t.factors.iter().all(|f| !f.is_zero()));
        self.terms = out;
        self
    }

    /// No term survives: the truncated operator is exactly zero. A nonempty
    /// term list can still cancel, so `false` is not a nonzero certificate.
    pub fn is_structurally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Decides exact vanishing entry by entry when the summed terms might
    /// cancel. `None` when the entry count times the term count exceeds `budget`.
    pub fn is_exactly_zero(&self, budget: usize) -> Option<bool> {
        match self.terms.len() {
            0 => return Some(true),
            // merged() keeps only nonzero coefficients and nonzero factors
            1 => return Some(false),
            _ => {}
        }
        let n = self.trunc.dim();
        let mut pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n);
        for j in 0..n {
            let cap = self.trunc.caps()[j];
            let mut offs: Vec<i64> = self.terms.iter().flat_map(|t| t.factors[j].offsets()).collect();
            offs.sort_unstable();
            offs.dedup();
            let mut slot = Vec::new();
            for d in offs {
                let len = cap.saturating_sub(d.unsigned_abs() as usize);
                for i in 0..len {
                    slot.push(if d >= 0 { (i + d as usize, i) } else { (i, i + (-d) as usize) });
                }
            }
            pairs.push(slot);
        }
        let count = pairs.iter().try_fold(self.terms.len(), |acc, s| acc.checked_mul(s.len()))?;
        if count > budget {
            return None;
        }
        let mut idx = vec![0usize; n];
        loop {
            let mut sum = crate::rational::crat_zero();
            for t in &self.terms {
                let mut v = t.coeff.clone();
                for j in 0..n {
                    let (l, m) = pairs[j][idx[j]];
                    v *= t.factors[j].scaled_entry(l, m);
                }
                sum += v;
            }
            if !crate::rational::is_crat_zero(&sum) {
                return Some(false);
            }
            let mut j = n;
            loop {
                if j == 0 {
                    return Some(true);
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < pairs[j].len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    pub fn to_float(&self) -> TensorOperator {
        TensorOperator {
            trunc: self.trunc.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| TensorTerm { coeff: crat_to_c64(&t.coeff), factors: t.factors.iter().map(|f| f.to_dense()).collect() })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorTerm {
    pub coeff: Complex64,
    pub factors: Vec<Array2<Complex64>>,
}

/// Floating tensor-structured operator.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorOperator {
    pub trunc: Truncation,
    pub terms: Vec<TensorTerm>,
}

impl TensorOperator {
    pub fn zero(trunc: Truncation) -> Self {
        TensorOperator { trunc, terms: Vec::new() }
    }

    pub fn identity(trunc: Truncation) -> Self {
        let factors = trunc.caps().iter().map(|&c| Array2::eye(c)).collect();
        TensorOperator { trunc, terms: vec![TensorTerm { coeff: Complex64::new(1.0, 0.0), factors }] }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch(format!("{:?} vs {:?}", self.trunc.caps(), other.trunc.caps())));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(TensorOperator { trunc: self.trunc.clone(), terms })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let terms = self.terms.iter().map(|t| TensorTerm { coeff: t.coeff * c, factors: t.factors.clone() }).collect();
        TensorOperator { trunc: self.trunc.clone(), terms }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for x in &self.terms {
            for y in &other.terms {
                terms.push(TensorTerm {
                    coeff: x.coeff * y.coeff,
                    factors: x.factors.iter().zip(&y.factors).map(|(a, b)| a.dot(b)).collect(),
                });
            }
        }
        Ok(TensorOperator { trunc: self.trunc.clone(), terms })
    }

    pub fn crop(&self, trunc: &Truncation) -> Result<Self> {
        if trunc.dim() != self.trunc.dim() || trunc.caps().iter().zip(self.trunc.caps()).any(|(a, b)| a > b) {
            return Err(Error::TruncationMismatch(format!("cannot crop {:?} to {:?}", self.trunc.caps(), trunc.caps())));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| TensorTerm {
                coeff: t.coeff,
                factors: t.factors.iter().zip(trunc.caps()).map(|(f, &c)| f.slice(ndarray::s![..c, ..c]).to_owned()).collect(),
            })
            .collect();
        Ok(TensorOperator { trunc: trunc.clone(), terms })
    }

    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| TensorTerm { coeff: t.coeff.conj(), factors: t.factors.iter().map(|f| f.t().mapv(|x| x.conj())).collect() })
            .collect();
        TensorOperator { trunc: self.trunc.clone(), terms }
    }

    pub fn to_matrix(&self) -> OperatorMatrix {
        let len = self.trunc.len();
        let mut acc = Array2::<Complex64>::zeros((len, len));
        for t in &self.terms {
            let mut k = Array2::from_elem((1, 1), t.coeff);
            for f in &t.factors {
                k = kron(&k, f);
            }
            acc += &k;
        }
        OperatorMatrix { trunc: self.trunc.clone(), entries: acc }
    }

    /// `A x` without forming the Kronecker products.
    pub fn apply(&self, x: &Array1<Complex64>) -> Array1<Complex64> {
        let len = self.trunc.len();
        assert_eq!(x.len(), len);
        let mut out = Array1::<Complex64>::zeros(len);
        for t in &self.terms {
            let mut y = x.clone();
            let caps = self.trunc.caps();
            for (j, f) in t.factors.iter().enumerate() {
                y = apply_mode(&y, caps, j, f.view());
            }
            out.scaled_add(t.coeff, &y);
        }
        out
    }

    /// Largest singular value by power iteration on `A^H A`.
    pub fn operator_norm(&self, tol: f64, seed: u64) -> Result<f64> {
        let finite = self.terms.iter().all(|t| {
            t.coeff.re.is_finite() && t.coeff.im.is_finite() && t.factors.iter().all(|f| f.iter().all(|x| x.re.is_finite() && x.im.is_finite()))
        });
        if !finite {
            return Err(Error::NonFinite);
        }
        if self.terms.is_empty() {
            return Ok(0.0);
        }
        let adj = self.adjoint();
        Ok(power_norm(self.trunc.len(), tol, seed, |x| adj.apply(&self.apply(x))))
    }

    /// `<A u, v>`-style quadratic form `<A x, x>` for a product vector `x = (x) x_j`.
    pub fn quadratic_form_product(&self, xs: &[Vec<Complex64>]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                t.factors
                    .iter()
                    .zip(xs)
                    .map(|(f, x)| {
                        let xv = ArrayView2::from_shape((x.len(), 1), x).unwrap();
                        let ax = f.dot(&xv);
                        x.iter().zip(ax.iter()).map(|(xi, yi)| yi * xi.conj()).sum::<Complex64>()
                    })
                    .product::<Complex64>()
                    * t.coeff
            })
            .sum()
    }
}

/// Applies `f` along variable `j` of a vector laid out mixed-radix (variable 1 slowest).
fn apply_mode(x: &Array1<Complex64>, caps: &[usize], j: usize, f: ArrayView2<Complex64>) -> Array1<Complex64> {
    let outer: usize = caps[..j].iter().product();
    let nj = caps[j];
    let inner: usize = caps[j + 1..].iter().product();
    let xv = x.view().into_shape_with_order((outer, nj, inner)).unwrap();
    let mut out = ndarray::Array3::<Complex64>::zeros((outer, nj, inner));
    for o in 0..outer {
        let block = xv.index_axis(ndarray::Axis(0), o);
        out.index_axis_mut(ndarray::Axis(0), o).assign(&f.dot(&block));
    }
    out.into_shape_with_order(outer * nj * inner).unwrap()
}
