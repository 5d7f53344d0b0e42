//! Dense operator matrices in the linearized multi-index basis.

use crate::basis::{MultiIndex, Truncation};
use crate::error::{Error, Result};
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub trunc: Truncation,
    pub entries: Array2<Complex64>,
}

impl OperatorMatrix {
    pub fn new(trunc: Truncation, entries: Array2<Complex64>) -> Result<Self> {
        let len = trunc.len();
        if entries.dim() != (len, len) {
            return Err(Error::TruncationMismatch(format!(
                "matrix is {:?}, truncation needs {len}x{len}",
                entries.dim()
            )));
        }
        Ok(OperatorMatrix { trunc, entries })
    }

    pub fn identity(trunc: Truncation) -> Self {
        let len = trunc.len();
        OperatorMatrix { trunc, entries: Array2::eye(len) }
    }

    pub fn zeros(trunc: Truncation) -> Self {
        let len = trunc.len();
        OperatorMatrix { trunc, entries: Array2::zeros((len, len)) }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.trunc != other.trunc {
            return Err(Error::TruncationMismatch(format!("{:?} vs {:?}", self.trunc.caps(), other.trunc.caps())));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(OperatorMatrix { trunc: self.trunc.clone(), entries: &self.entries + &other.entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(OperatorMatrix { trunc: self.trunc.clone(), entries: &self.entries - &other.entries })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(OperatorMatrix { trunc: self.trunc.clone(), entries: self.entries.dot(&other.entries) })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        OperatorMatrix { trunc: self.trunc.clone(), entries: self.entries.mapv(|x| x * c) }
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix { trunc: self.trunc.clone(), entries: self.entries.t().mapv(|x| x.conj()) }
    }

    pub fn entry(&self, l: &MultiIndex, m: &MultiIndex) -> Result<Complex64> {
        Ok(self.entries[[self.trunc.linearize(l)?, self.trunc.linearize(m)?]])
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, x| acc.max(x.norm()))
    }

    /// `max |A - A^H|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.entries.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entries[[i, j]] - self.entries[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Largest absolute off-diagonal entry.
    pub fn off_diagonal_max(&self) -> f64 {
        self.entries
            .indexed_iter()
            .filter(|((i, j), _)| i != j)
            .fold(0.0, |acc, (_, x)| acc.max(x.norm()))
    }

    /// Leading block for a smaller truncation of the same dimension.
    pub fn crop(&self, trunc: &Truncation) -> Result<Self> {
        if trunc.dim() != self.trunc.dim() || trunc.caps().iter().zip(self.trunc.caps()).any(|(a, b)| a > b) {
            return Err(Error::TruncationMismatch(format!("cannot crop {:?} to {:?}", self.trunc.caps(), trunc.caps())));
        }
        let map: Vec<usize> = trunc.indices().map(|m| self.trunc.linearize(&m).unwrap()).collect();
        let entries = Array2::from_shape_fn((map.len(), map.len()), |(i, j)| self.entries[[map[i], map[j]]]);
        Ok(OperatorMatrix { trunc: trunc.clone(), entries })
    }

    pub fn apply(&self, x: &Array1<Complex64>) -> Array1<Complex64> {
        self.entries.dot(x)
    }

    /// CSV `row,col,re,im` over entries with `|a| > 1e-300`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,re,im\n");
        for ((i, j), x) in self.entries.indexed_iter() {
            if x.norm() > 1e-300 {
                let _ = writeln!(s, "{i},{j},{},{}", x.re, x.im);
            }
        }
        s
    }

    pub fn operator_norm(&self, tol: f64, seed: u64) -> Result<f64> {
        if self.entries.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let a = &self.entries;
        let ah = a.t().mapv(|x| x.conj());
        Ok(power_norm(a.nrows(), tol, seed, |x| ah.dot(&a.dot(x))))
    }
}

/// Standard Kronecker product `A (x) B` with the first factor slowest.
pub fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        block.zip_mut_with(b, |o, &y| *o = x * y);
    }
    out
}

/// Kronecker product of a one-variable operator with an operator on the remaining variables.
pub fn kronecker(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    let mut caps = a.trunc.caps().to_vec();
    caps.extend_from_slice(b.trunc.caps());
    OperatorMatrix::new(Truncation::new(caps)?, kron(&a.entries, &b.entries))
}

/// Power iteration for `sqrt(lambda_max(A^H A))` given the map `x -> A^H A x`.
/// Starts from the normalized all-ones vector; on stagnation below the
/// tolerance after the first pass, restarts once from a seeded random vector
/// and keeps the larger estimate.
pub fn power_norm(len: usize, tol: f64, seed: u64, gram: impl Fn(&Array1<Complex64>) -> Array1<Complex64>) -> f64 {
    if len == 0 {
        return 0.0;
    }
    let run = |mut x: Array1<Complex64>| -> (f64, bool) {
        normalize(&mut x);
        let mut lambda = 0.0f64;
        for _ in 0..5000 {
            let y = gram(&x);
            let ny = norm(&y);
            if ny == 0.0 {
                return (0.0, true);
            }
            let converged = (ny - lambda).abs() <= tol * ny;
            lambda = ny;
            x = y.mapv(|v| v / ny);
            if converged {
                return (lambda, true);
            }
        }
        (lambda, false)
    };
    let (first, ok) = run(Array1::from_elem(len, Complex64::new(1.0, 0.0)));
    // The all-ones start can be orthogonal to the top singular vector
    // (zero estimate or no convergence); retry from a random start.
    if ok && first > 0.0 {
        return first.sqrt();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Array1::from_shape_fn(len, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let (second, _) = run(start);
    first.max(second).sqrt()
}

fn norm(x: &Array1<Complex64>) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(x: &mut Array1<Complex64>) {
    let n = norm(x);
    if n > 0.0 {
        x.mapv_inplace(|v| v / n);
    }
}
