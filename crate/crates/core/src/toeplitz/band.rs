//! Exact one-variable Toeplitz matrices in scaled form.
//!
//! The stored value `s(l, m)` relates to the matrix entry by
//! `A[l][m] = sqrt(l + 1) * sqrt(m + 1) * s(l, m)`, which keeps every entry
//! of the closed symbol class rational.

use crate::error::{Error, Result};
use crate::rational::{crat_real, crat_to_c64, crat_zero, is_crat_zero, CRat, Rat};
use crate::symbols::{UniSum, UniTerm};
use ndarray::Array2;
use num_complex::Complex64;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledBandMatrix {
    cap: usize,
    /// Offset `d = l - m` to the scaled entries, indexed by `min(l, m)`.
    bands: BTreeMap<i64, Vec<CRat>>,
}

fn band_len(cap: usize, d: i64) -> usize {
    cap.saturating_sub(d.unsigned_abs() as usize)
}

/// Position `(l, m)` of slot `i` on band `d`.
fn band_pos(d: i64, i: usize) -> (usize, usize) {
    if d >= 0 {
        (i + d as usize, i)
    } else {
        (i, i + d.unsigned_abs() as usize)
    }
}

impl ScaledBandMatrix {
    pub fn zero(cap: usize) -> Self {
        ScaledBandMatrix { cap, bands: BTreeMap::new() }
    }

    /// `s(m, m) = 1 / (m + 1)`.
    pub fn identity(cap: usize) -> Self {
        let diag = (0..cap).map(|m| crat_real(Rat::new(1.into(), (m as i64 + 1).into()))).collect();
        ScaledBandMatrix { cap, bands: BTreeMap::from([(0, diag)]) }
    }

    /// Exact assembly of `T_u` for one term `c rho(r) z^a conj(z)^b`:
    /// `s(l, m) = c * moment(rho, m + a)` on the band `l - m = a - b`.
    pub fn from_term(t: &UniTerm, cap: usize) -> Self {
        let d = t.offset();
        let len = band_len(cap, d);
        if len == 0 || is_crat_zero(&t.scale) {
            return Self::zero(cap);
        }
        let band = (0..len)
            .map(|i| {
                let (_, m) = band_pos(d, i);
                t.scale.clone() * crat_real(t.radial.moment(m + t.a as usize))
            })
            .collect();
        let mut out = ScaledBandMatrix { cap, bands: BTreeMap::from([(d, band)]) };
        out.prune();
        out
    }

    pub fn from_unisum(u: &UniSum, cap: usize) -> Self {
        u.terms().iter().fold(Self::zero(cap), |acc, t| acc.add(&Self::from_term(t, cap)).unwrap())
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn offsets(&self) -> impl Iterator<Item = i64> + '_ {
        self.bands.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.bands.is_empty()
    }

    /// Largest `|l - m|` carrying a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        self.bands.keys().map(|d| d.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn scaled_entry(&self, l: usize, m: usize) -> CRat {
        let d = l as i64 - m as i64;
        match self.bands.get(&d) {
            Some(b) if l < self.cap && m < self.cap => b[l.min(m)].clone(),
            _ => crat_zero(),
        }
    }

    fn prune(&mut self) {
        self.bands.retain(|_, b| b.iter().any(|c| !is_crat_zero(c)));
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.cap != other.cap {
            return Err(Error::TruncationMismatch(format!("{} vs {}", self.cap, other.cap)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (&d, b) in &other.bands {
            let e = out.bands.entry(d).or_insert_with(|| vec![crat_zero(); b.len()]);
            for (x, y) in e.iter_mut().zip(b) {
                *x = x.clone() + y.clone();
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, c: &CRat) -> Self {
        let mut out = self.clone();
        for b in out.bands.values_mut() {
            for x in b.iter_mut() {
                *x = x.clone() * c.clone();
            }
        }
        out.prune();
        out
    }

    /// Matrix product in scaled form: `s_AB(l, m) = sum_k (k + 1) s_A(l, k) s_B(k, m)`.
    pub fn compose_exact(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let cap = self.cap;
        let mut bands: BTreeMap<i64, Vec<CRat>> = BTreeMap::new();
        for (&da, ba) in &self.bands {
            for (&db, bb) in &other.bands {
                let d = da + db;
                let len = band_len(cap, d);
                if len == 0 {
                    continue;
                }
                let out = bands.entry(d).or_insert_with(|| vec![crat_zero(); len]);
                for (ib, sb) in bb.iter().enumerate() {
                    let (k, m) = band_pos(db, ib);
                    let l = k as i64 + da;
                    if l < 0 || l as usize >= cap {
                        continue;
                    }
                    let sa = &ba[(l as usize).min(k)];
                    if is_crat_zero(sa) || is_crat_zero(sb) {
                        continue;
                    }
                    let w = crat_real(Rat::from_integer((k as i64 + 1).into()));
                    let slot = (l as usize).min(m);
                    out[slot] = out[slot].clone() + sa.clone() * sb.clone() * w;
                }
            }
        }
        let mut out = ScaledBandMatrix { cap, bands };
        out.prune();
        Ok(out)
    }

    /// Leading `cap x cap` block.
    pub fn crop(&self, cap: usize) -> Self {
        assert!(cap <= self.cap);
        let bands = self
            .bands
            .iter()
            .filter_map(|(&d, b)| {
                let len = band_len(cap, d);
                (len > 0).then(|| (d, b[..len].to_vec()))
            })
            .collect();
        let mut out = ScaledBandMatrix { cap, bands };
        out.prune();
        out
    }

    /// Exact Hermitian test in scaled form: `s(l, m) = conj(s(m, l))`.
    pub fn is_hermitian(&self) -> bool {
        self.bands.iter().all(|(&d, b)| match self.bands.get(&-d) {
            Some(c) => b.iter().zip(c).all(|(x, y)| *x == y.conj()),
            None => false,
        })
    }

    /// Diagonal entries `(m + 1) s(m, m)` when the matrix is diagonal.
    pub fn diagonal_entries(&self) -> Option<Vec<CRat>> {
        if self.bands.keys().any(|&d| d != 0) {
            return None;
        }
        Some(
            (0..self.cap)
                .map(|m| {
                    self.bands
                        .get(&0)
                        .map(|b| b[m].clone() * crat_real(Rat::from_integer((m as i64 + 1).into())))
                        .unwrap_or_else(crat_zero)
                })
                .collect(),
        )
    }

    /// Floating export, multiplying in the square-root weights.
    pub fn to_dense(&self) -> Array2<Complex64> {
        let mut a = Array2::zeros((self.cap, self.cap));
        for (&d, b) in &self.bands {
            for (i, s) in b.iter().enumerate() {
                if is_crat_zero(s) {
                    continue;
                }
                let (l, m) = band_pos(d, i);
                a[[l, m]] = crat_to_c64(s) * (((l + 1) * (m + 1)) as f64).sqrt();
            }
        }
        a
    }
}
