//! Exact polynomials in `z_1..z_n` and their conjugates.

use super::expr::{SymbolExpr, TensorTerm, UniSum, UniTerm};
use crate::error::{Error, Result};
use crate::rational::{crat_one, crat_to_c64, crat_zero, format_crat, is_crat_zero, rat_int, CRat, Rat};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Multi-exponent: `(a_j, b_j)` for the factor `z_j^{a_j} conj(z_j)^{b_j}`.
pub type Exponent = Vec<(u32, u32)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyZZbar {
    n: usize,
    coeffs: BTreeMap<Exponent, CRat>,
}

/// `f(z) = sum_j p_j(|z|^2) z^j + sum_{j>=1} q_j(|z|^2) conj(z)^j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RadialForm {
    /// `j -> p_j`, ascending coefficients in `t = |z|^2`.
    pub holo: BTreeMap<u32, Vec<CRat>>,
    /// `j -> q_j` for `j >= 1`.
    pub anti: BTreeMap<u32, Vec<CRat>>,
}

fn tpoly_at_one(p: &[CRat]) -> CRat {
    p.iter().fold(crat_zero(), |acc, c| acc + c.clone())
}

/// Exact division by `1 - t`; caller guarantees `p(1) = 0`.
fn divide_one_minus_t(p: &[CRat]) -> Vec<CRat> {
    // p(t) = (t - 1) h(t) via synthetic division, then g = -h.
    let deg = p.len() - 1;
    let mut h = vec![crat_zero(); deg];
    let mut carry = crat_zero();
    for k in (1..=deg).rev() {
        carry += p[k].clone();
        h[k - 1] = carry.clone();
    }
    h.into_iter().map(|c| -c).collect()
}

impl PolyZZbar {
    pub fn zero(n: usize) -> Self {
        PolyZZbar { n, coeffs: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: CRat) -> Self {
        let mut p = Self::zero(n);
        p.insert(vec![(0, 0); n], c);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, crat_one())
    }

    /// `c * z^a conj(z)^b` (multi-exponent).
    pub fn monomial(exp: Exponent, c: CRat) -> Self {
        let mut p = Self::zero(exp.len());
        p.insert(exp, c);
        p
    }

    /// `z_k`, 1-based.
    pub fn z(n: usize, k: usize) -> Self {
        let mut e = vec![(0, 0); n];
        e[k - 1] = (1, 0);
        Self::monomial(e, crat_one())
    }

    pub fn zbar(n: usize, k: usize) -> Self {
        Self::z(n, k).conj()
    }

    /// `1 - |z_k|^2`.
    pub fn one_minus_mod2(n: usize, k: usize) -> Self {
        Self::one(n).sub(&Self::z(n, k).mul(&Self::zbar(n, k)))
    }

    fn insert(&mut self, exp: Exponent, c: CRat) {
        let e = self.coeffs.entry(exp).or_insert_with(crat_zero);
        *e = e.clone() + c;
        self.coeffs.retain(|_, v| !is_crat_zero(v));
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &BTreeMap<Exponent, CRat> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-crat_one()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CRat) -> Self {
        let mut out = Self::zero(self.n);
        for (e, v) in &self.coeffs {
            out.insert(e.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                let e = e1.iter().zip(e2).map(|(x, y)| (x.0 + y.0, x.1 + y.1)).collect();
                out.insert(e, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.n), |acc, _| acc.mul(self))
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.coeffs {
            out.insert(e.iter().map(|&(a, b)| (b, a)).collect(), c.conj());
        }
        out
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(z)
                    .fold(crat_to_c64(c), |acc, (&(a, b), zj)| acc * zj.powu(a) * zj.conj().powu(b))
            })
            .sum()
    }

    /// `Delta_j p = 4 d^2 p / (dz_j d conj(z_j))`, `j` 1-based.
    pub fn laplacian(&self, j: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.coeffs {
            let (a, b) = e[j - 1];
            if a == 0 || b == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[j - 1] = (a - 1, b - 1);
            let f = CRat::new(rat_int(4 * a as i64 * b as i64), Rat::zero());
            out.insert(e2, c.clone() * f);
        }
        out
    }

    /// 1-based index of the first variable in which `p` is not harmonic.
    pub fn first_non_harmonic(&self) -> Option<usize> {
        (1..=self.n).find(|&j| !self.laplacian(j).is_zero())
    }

    pub fn is_n_harmonic(&self) -> bool {
        self.first_non_harmonic().is_none()
    }

    fn require_univariate(&self) -> Result<()> {
        if self.n != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.n });
        }
        Ok(())
    }

    pub fn canonical_radial_form(&self) -> Result<RadialForm> {
        self.require_univariate()?;
        let mut form = RadialForm::default();
        for (e, c) in &self.coeffs {
            let (a, b) = e[0];
            let (slot, j, t) = if a >= b {
                (&mut form.holo, a - b, b)
            } else {
                (&mut form.anti, b - a, a)
            };
            let poly = slot.entry(j).or_default();
            if poly.len() <= t as usize {
                poly.resize(t as usize + 1, crat_zero());
            }
            poly[t as usize] = poly[t as usize].clone() + c.clone();
        }
        Ok(form)
    }

    pub fn from_radial_form(form: &RadialForm) -> Self {
        let mut out = Self::zero(1);
        for (&j, p) in &form.holo {
            for (t, c) in p.iter().enumerate() {
                out.insert(vec![(j + t as u32, t as u32)], c.clone());
            }
        }
        for (&j, q) in &form.anti {
            for (t, c) in q.iter().enumerate() {
                out.insert(vec![(t as u32, j + t as u32)], c.clone());
            }
        }
        out
    }

    /// `g` with `f = (1 - |z|^2) g`, when every radial coefficient vanishes at `t = 1`.
    pub fn divide_by_one_minus_mod2(&self) -> Result<Option<Self>> {
        let form = self.canonical_radial_form()?;
        let all = form.holo.values().chain(form.anti.values());
        if all.clone().any(|p| !is_crat_zero(&tpoly_at_one(p))) {
            return Ok(None);
        }
        let quotient = RadialForm {
            holo: form.holo.iter().map(|(&j, p)| (j, divide_one_minus_t(p))).collect(),
            anti: form.anti.iter().map(|(&j, p)| (j, divide_one_minus_t(p))).collect(),
        };
        Ok(Some(Self::from_radial_form(&quotient)))
    }

    pub fn circle_vanishing(&self) -> Result<bool> {
        Ok(self.divide_by_one_minus_mod2()?.is_some())
    }

    /// Restriction `z_k = xi` with `|xi| = 1` kept symbolic:
    /// `xi^a conj(xi)^b = xi^{a-b}`, giving Laurent coefficients in `n - 1` variables.
    pub fn restrict_laurent(&self, k: usize) -> Result<BTreeMap<i64, PolyZZbar>> {
        if k == 0 || k > self.n || self.n < 2 {
            return Err(Error::BadCoordinate { k, n: self.n });
        }
        let mut out: BTreeMap<i64, PolyZZbar> = BTreeMap::new();
        for (e, c) in &self.coeffs {
            let mut rest = e.clone();
            let (a, b) = rest.remove(k - 1);
            out.entry(a as i64 - b as i64)
                .or_insert_with(|| PolyZZbar::zero(self.n - 1))
                .insert(rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        Ok(out)
    }

    /// Whether `p` vanishes identically on the face `{|z_k| = 1}` of the closed polydisc.
    pub fn vanishes_on_face(&self, k: usize) -> Result<bool> {
        if self.n == 1 {
            return self.circle_vanishing();
        }
        Ok(self.restrict_laurent(k)?.is_empty())
    }

    pub fn to_symbol(&self) -> SymbolExpr {
        let terms = self
            .coeffs
            .iter()
            .map(|(e, c)| TensorTerm {
                coeff: c.clone(),
                factors: e
                    .iter()
                    .map(|&(a, b)| UniSum::from_terms(vec![UniTerm::monomial(a, b, crat_one())]))
                    .collect(),
            })
            .collect();
        SymbolExpr::from_terms(self.n, terms)
    }

    /// Exact conversion back from a symbol whose radial profiles are all trivial.
    pub fn from_symbol(s: &SymbolExpr) -> Result<Self> {
        let n = s.dim();
        let mut out = Self::zero(n);
        for t in s.terms() {
            let mut acc = Self::constant(n, t.coeff.clone());
            for (j, u) in t.factors.iter().enumerate() {
                let mut f = Self::zero(n);
                for term in u.terms() {
                    if !term.is_polynomial() {
                        return Err(Error::NotPolynomial);
                    }
                    let mut e = vec![(0, 0); n];
                    e[j] = (term.a, term.b);
                    f.insert(e, term.scale.clone());
                }
                acc = acc.mul(&f);
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    pub fn total_degree(&self) -> u32 {
        self.coeffs.keys().map(|e| e.iter().map(|(a, b)| a + b).sum()).max().unwrap_or(0)
    }

    /// Raise each coefficient to its exact value to make test construction terse.
    pub fn from_pairs(n: usize, pairs: &[(Exponent, (i64, i64))]) -> Self {
        let mut p = Self::zero(n);
        for (e, (num, den)) in pairs {
            p.insert(e.clone(), CRat::new(crate::rational::rat(*num, *den), Rat::zero()));
        }
        p
    }
}

impl fmt::Display for PolyZZbar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            let mut vars: Vec<String> = Vec::new();
            for (j, &(a, b)) in e.iter().enumerate() {
                let v = j + 1;
                match a {
                    0 => {}
                    1 => vars.push(format!("z{v}")),
                    _ => vars.push(format!("z{v}^{a}")),
                }
                match b {
                    0 => {}
                    1 => vars.push(format!("conj(z{v})")),
                    _ => vars.push(format!("conj(z{v})^{b}")),
                }
            }
            let real_neg = c.im.is_zero() && c.re.is_negative();
            let mag = if real_neg { -c.clone() } else { c.clone() };
            if i > 0 {
                write!(f, "{}", if real_neg { " - " } else { " + " })?;
            } else if real_neg {
                write!(f, "-")?;
            }
            let unit = mag.re.is_one() && mag.im.is_zero();
            let body = match (unit, vars.is_empty()) {
                (true, true) => "1".to_string(),
                (true, false) => vars.join("*"),
                (false, true) => format_crat(&mag),
                (false, false) => format!("{}*{}", format_crat(&mag), vars.join("*")),
            };
            write!(f, "{body}")?;
        }
        Ok(())
    }
}

