//! Orthonormal monomial basis of the Bergman space on the polydisc.
//!
//! Measure convention: normalized volume `dV / pi^n`, so `||z^m||^2 = prod 1/(m_j+1)`,
//! `e_m = prod sqrt(m_j+1) z_j^{m_j}` is orthonormal and the reproducing kernel is
//! `K(z, w) = prod (1 - z_j conj(w_j))^{-2}`. Multi-indices are linearized
//! mixed-radix with variable 1 slowest.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Per-variable degree caps; degree `m_j` ranges over `0..caps[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Truncation {
    caps: Vec<usize>,
}

impl Truncation {
    pub fn new(caps: Vec<usize>) -> Result<Self> {
        if caps.is_empty() {
            return Err(Error::InvalidTruncation("dimension must be at least 1".into()));
        }
        if let Some(j) = caps.iter().position(|&c| c == 0) {
            return Err(Error::InvalidTruncation(format!("cap for variable {} is 0", j + 1)));
        }
        Ok(Truncation { caps })
    }

    pub fn uniform(n: usize, cap: usize) -> Result<Self> {
        Self::new(vec![cap; n])
    }

    pub fn caps(&self) -> &[usize] {
        &self.caps
    }

    pub fn dim(&self) -> usize {
        self.caps.len()
    }

    /// Total number of basis elements.
    pub fn len(&self) -> usize {
        self.caps.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn padded(&self, pad: usize) -> Truncation {
        Truncation { caps: self.caps.iter().map(|c| c + pad).collect() }
    }

    /// Truncation with slot `k` (0-based) removed.
    pub fn without(&self, k: usize) -> Result<Truncation> {
        if k >= self.caps.len() {
            return Err(Error::BadCoordinate { k: k + 1, n: self.caps.len() });
        }
        let mut caps = self.caps.clone();
        caps.remove(k);
        Truncation::new(caps)
    }

    pub fn linearize(&self, m: &MultiIndex) -> Result<usize> {
        if m.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: m.dim() });
        }
        let mut idx = 0usize;
        for (&mj, &cap) in m.0.iter().zip(&self.caps) {
            if mj >= cap {
                return Err(Error::TruncationMismatch(format!("degree {mj} outside cap {cap}")));
            }
            idx = idx * cap + mj;
        }
        Ok(idx)
    }

    pub fn delinearize(&self, mut idx: usize) -> MultiIndex {
        let mut out = vec![0; self.caps.len()];
        for (slot, &cap) in out.iter_mut().zip(&self.caps).rev() {
            *slot = idx % cap;
            idx /= cap;
        }
        MultiIndex(out)
    }

    pub fn indices(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.len()).map(move |i| self.delinearize(i))
    }
}

/// A point of the closed polydisc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<Complex64>,
}

impl Point {
    pub fn new(coords: Vec<Complex64>) -> Self {
        Point { coords }
    }

    pub fn origin(n: usize) -> Self {
        Point { coords: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn real(xs: &[f64]) -> Self {
        Point { coords: xs.iter().map(|&x| Complex64::new(x, 0.0)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_interior(&self) -> bool {
        self.coords.iter().all(|c| c.norm() < 1.0)
    }

    /// 0-based indices of the faces `{|z_j| = 1}` this point lies on.
    pub fn boundary_faces(&self, tol: f64) -> Vec<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| (c.norm() - 1.0).abs() <= tol)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn require_interior(&self) -> Result<()> {
        for (j, c) in self.coords.iter().enumerate() {
            if !(c.norm() < 1.0) {
                return Err(Error::BoundaryPoint { coord: j + 1, modulus: c.norm() });
            }
        }
        Ok(())
    }
}

/// Coefficients of an element of the truncated Bergman space in the basis `e_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefVector {
    pub trunc: Truncation,
    pub coeffs: Vec<Complex64>,
}

impl CoefVector {
    pub fn new(trunc: Truncation, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != trunc.len() {
            return Err(Error::TruncationMismatch(format!(
                "{} coefficients for {} basis elements",
                coeffs.len(),
                trunc.len()
            )));
        }
        Ok(CoefVector { trunc, coeffs })
    }

    pub fn zeros(trunc: Truncation) -> Self {
        let len = trunc.len();
        CoefVector { trunc, coeffs: vec![Complex64::new(0.0, 0.0); len] }
    }

    /// The basis vector `e_m`.
    pub fn basis(trunc: Truncation, m: &MultiIndex) -> Result<Self> {
        let idx = trunc.linearize(m)?;
        let mut v = Self::zeros(trunc);
        v.coeffs[idx] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// CSV with header `index,m1,...,mn,re,im`, rows in linearization order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index");
        for j in 1..=self.trunc.dim() {
            let _ = write!(s, ",m{j}");
        }
        s.push_str(",re,im\n");
        for (i, c) in self.coeffs.iter().enumerate() {
            let _ = write!(s, "{i}");
            for mj in self.trunc.delinearize(i).0 {
                let _ = write!(s, ",{mj}");
            }
            let _ = writeln!(s, ",{},{}", c.re, c.im);
        }
        s
    }
}

/// One-variable normalized kernel coefficients `(1-|p|^2) sqrt(m+1) conj(p)^m`, `m < cap`.
pub fn kernel_coeffs_1d(p: Complex64, cap: usize) -> Vec<Complex64> {
    let scale = 1.0 - p.norm_sqr();
    let pc = p.conj();
    let mut pow = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(cap);
    for m in 0..cap {
        out.push(pow * (scale * ((m + 1) as f64).sqrt()));
        pow *= pc;
    }
    out
}

/// Truncated expansion of the normalized reproducing kernel `k_p`.
pub fn kernel_coeffs(p: &Point, trunc: &Truncation) -> Result<CoefVector> {
    if p.dim() != trunc.dim() {
        return Err(Error::DimensionMismatch { expected: trunc.dim(), got: p.dim() });
    }
    p.require_interior()?;
    let factors: Vec<Vec<Complex64>> = p
        .coords
        .iter()
        .zip(trunc.caps())
        .map(|(&pj, &cap)| kernel_coeffs_1d(pj, cap))
        .collect();
    let coeffs = tensor_vector(&factors);
    CoefVector::new(trunc.clone(), coeffs)
}

/// Outer product of per-variable vectors in mixed-radix order (variable 1 slowest).
pub fn tensor_vector(factors: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(1.0, 0.0)];
    for f in factors {
        let mut next = Vec::with_capacity(acc.len() * f.len());
        for a in &acc {
            for b in f {
                next.push(a * b);
            }
        }
        acc = next;
    }
    acc
}

/// Mass of `k_p` lost to the truncation, `1 - ||k_p truncated||^2`, from the closed form
/// `1 - prod_j (1 - |p_j|^{2N_j} (1 + N_j (1 - |p_j|^2)))`.
pub fn kernel_mass_defect(p: &Point, trunc: &Truncation) -> f64 {
    let kept: f64 = p
        .coords
        .iter()
        .zip(trunc.caps())
        .map(|(pj, &cap)| {
            let x = pj.norm_sqr();
            1.0 - x.powi(cap as i32) * (1.0 + cap as f64 * (1.0 - x))
        })
        .product();
    (1.0 - kept).max(0.0)
}

/// `K(z, p) = prod_j (1 - z_j conj(p_j))^{-2}`.
pub fn eval_kernel(z: &Point, p: &Point) -> Result<Complex64> {
    if z.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: z.dim() });
    }
    p.require_interior()?;
    Ok(z.coords
        .iter()
        .zip(&p.coords)
        .map(|(zj, pj)| {
            let d = Complex64::new(1.0, 0.0) - zj * pj.conj();
            (d * d).inv()
        })
        .product())
}

/// `<u, v> = sum_m u_m conj(v_m)`.
pub fn inner_product(u: &CoefVector, v: &CoefVector) -> Result<Complex64> {
    if u.trunc != v.trunc {
        return Err(Error::TruncationMismatch(format!(
            "{:?} vs {:?}",
            u.trunc.caps(),
            v.trunc.caps()
        )));
    }
    Ok(u.coeffs.iter().zip(&v.coeffs).map(|(a, b)| a * b.conj()).sum())
}
