//! The closed symbol algebra: finite sums of tensor products of one-variable
//! quasi-homogeneous terms `scale * rho(|z|) * z^a * conj(z)^b`.

use super::radial::PiecewiseRadial;
use crate::error::{Error, Result};
use crate::rational::{
    crat_key, crat_one, crat_to_c64, crat_unit_pow, crat_zero, format_crat, is_crat_zero, is_unimodular,
    rat_int, CRat, Rat,
};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct UniTerm {
    pub radial: PiecewiseRadial,
    pub a: u32,
    pub b: u32,
    pub scale: CRat,
}

impl Eq for UniTerm {}

impl PartialOrd for UniTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for UniTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shape_cmp(other).then_with(|| crat_key(&self.scale).cmp(&crat_key(&other.scale)))
    }
}

impl UniTerm {
    pub fn new(radial: PiecewiseRadial, a: u32, b: u32, scale: CRat) -> Self {
        UniTerm { radial, a, b, scale }
    }

    pub fn monomial(a: u32, b: u32, scale: CRat) -> Self {
        UniTerm { radial: PiecewiseRadial::one(), a, b, scale }
    }

    fn shape_cmp(&self, other: &Self) -> Ordering {
        (self.a, self.b).cmp(&(other.a, other.b)).then_with(|| self.radial.cmp(&other.radial))
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.shape_cmp(other) == Ordering::Equal
    }

    pub fn is_polynomial(&self) -> bool {
        self.radial.is_one()
    }

    /// Angular frequency `a - b`; the Toeplitz matrix lives on this diagonal offset.
    pub fn offset(&self) -> i64 {
        self.a as i64 - self.b as i64
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        crat_to_c64(&self.scale) * self.radial.eval(r) * z.powu(self.a) * z.conj().powu(self.b)
    }

    /// Splits into canonical terms: even single-piece profiles expand into
    /// monomials with unit profile; other profiles absorb `|z|^{2 min(a,b)}`.
    fn canonical_parts(self) -> Vec<UniTerm> {
        if is_crat_zero(&self.scale) || self.radial.is_zero() {
            return Vec::new();
        }
        if let Some(poly) = self.radial.as_global_poly() {
            if poly.iter().enumerate().all(|(k, c)| k % 2 == 0 || c.is_zero()) {
                return poly
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| {
                        let j = (k / 2) as u32;
                        UniTerm::monomial(self.a + j, self.b + j, self.scale.clone() * CRat::new(c.clone(), Rat::zero()))
                    })
                    .collect();
            }
        }
        let m = self.a.min(self.b);
        let radial = self.radial.mul_r2(m);
        let lead = radial.leading_coefficient();
        vec![UniTerm {
            radial: radial.scale(&(Rat::one() / &lead)),
            a: self.a - m,
            b: self.b - m,
            scale: self.scale * CRat::new(lead, Rat::zero()),
        }]
    }

    fn mul(&self, other: &UniTerm) -> UniTerm {
        UniTerm {
            radial: self.radial.mul(&other.radial),
            a: self.a + other.a,
            b: self.b + other.b,
            scale: self.scale.clone() * other.scale.clone(),
        }
    }

    fn conj(&self) -> UniTerm {
        UniTerm { radial: self.radial.clone(), a: self.b, b: self.a, scale: self.scale.conj() }
    }
}

/// A one-variable symbol: a finite sum of [`UniTerm`]s in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct UniSum {
    terms: Vec<UniTerm>,
}

impl UniSum {
    pub fn from_terms(terms: Vec<UniTerm>) -> Self {
        let mut parts: Vec<UniTerm> = terms.into_iter().flat_map(UniTerm::canonical_parts).collect();
        parts.sort_by(|x, y| x.shape_cmp(y));
        let mut out: Vec<UniTerm> = Vec::with_capacity(parts.len());
        for t in parts {
            match out.last_mut() {
                Some(last) if last.same_shape(&t) => last.scale = last.scale.clone() + t.scale,
                _ => out.push(t),
            }
        }
        out.retain(|t| !is_crat_zero(&t.scale));
        UniSum { terms: out }
    }

    pub fn zero() -> Self {
        UniSum::default()
    }

    pub fn constant(c: CRat) -> Self {
        Self::from_terms(vec![UniTerm::monomial(0, 0, c)])
    }

    pub fn one() -> Self {
        Self::constant(crat_one())
    }

    pub fn terms(&self) -> &[UniTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<CRat> {
        match self.terms.as_slice() {
            [] => Some(crat_zero()),
            [t] if t.is_polynomial() && t.a == 0 && t.b == 0 => Some(t.scale.clone()),
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(UniTerm::is_polynomial)
    }

    pub fn add(&self, other: &UniSum) -> UniSum {
        Self::from_terms(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn mul(&self, other: &UniSum) -> UniSum {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for x in &self.terms {
            for y in &other.terms {
                terms.push(x.mul(y));
            }
        }
        Self::from_terms(terms)
    }

    pub fn scale(&self, c: &CRat) -> UniSum {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| UniTerm { scale: t.scale.clone() * c.clone(), ..t.clone() })
                .collect(),
        )
    }

    pub fn conj(&self) -> UniSum {
        Self::from_terms(self.terms.iter().map(UniTerm::conj).collect())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    /// Restriction to the unit circle as a Laurent polynomial in `xi`:
    /// offset `d` maps to `sum scale * rho(1)` over terms with `a - b = d`.
    pub fn circle_laurent(&self) -> BTreeMap<i64, CRat> {
        let mut out: BTreeMap<i64, CRat> = BTreeMap::new();
        for t in &self.terms {
            let v = t.scale.clone() * CRat::new(t.radial.value_at_one(), Rat::zero());
            let e = out.entry(t.offset()).or_insert_with(crat_zero);
            *e = e.clone() + v;
        }
        out.retain(|_, v| !is_crat_zero(v));
        out
    }

    /// Exact value at a unimodular rational point.
    pub fn eval_on_circle(&self, xi: &CRat) -> CRat {
        self.circle_laurent()
            .into_iter()
            .fold(crat_zero(), |acc, (d, c)| acc + c * crat_unit_pow(xi, d))
    }

    /// Largest `|a - b|`.
    pub fn angular_degree(&self) -> usize {
        self.terms.iter().map(|t| t.offset().unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Largest `max(a, b)`, the number of basis slots a term can shift a coefficient.
    pub fn max_shift(&self) -> usize {
        self.terms.iter().map(|t| t.a.max(t.b) as usize).max().unwrap_or(0)
    }

    pub fn breakpoints_f64(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.terms.iter().flat_map(|t| t.radial.breakpoints_f64()).collect();
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.dedup();
        b
    }

    pub fn discontinuities(&self) -> Vec<Rat> {
        let mut d: Vec<Rat> = self.terms.iter().flat_map(|t| t.radial.discontinuities()).collect();
        d.sort();
        d.dedup();
        d
    }

    fn write_with_var(&self, f: &mut fmt::Formatter<'_>, var: usize) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write_uniterm(f, t, var)?;
        }
        Ok(())
    }
}

fn write_uniterm(f: &mut fmt::Formatter<'_>, t: &UniTerm, var: usize) -> fmt::Result {
    let mut parts: Vec<String> = Vec::new();
    if t.scale != crat_one() {
        parts.push(format_crat(&t.scale));
    }
    if !t.radial.is_one() {
        parts.push(format!("radial(z{var}; {})", t.radial));
    }
    match t.a {
        0 => {}
        1 => parts.push(format!("z{var}")),
        a => parts.push(format!("z{var}^{a}")),
    }
    match t.b {
        0 => {}
        1 => parts.push(format!("conj(z{var})")),
        b => parts.push(format!("conj(z{var})^{b}")),
    }
    if parts.is_empty() {
        parts.push("1".into());
    }
    write!(f, "{}", parts.join("*"))
}

/// One tensor term `coeff * prod_j factors[j](z_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorTerm {
    pub coeff: CRat,
    pub factors: Vec<UniSum>,
}

impl TensorTerm {
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.factors
            .iter()
            .zip(z)
            .fold(crat_to_c64(&self.coeff), |acc, (u, &zj)| acc * u.eval(zj))
    }
}

/// A boundary-continuous (when all radial profiles are) symbol on the closed polydisc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolExpr {
    n: usize,
    terms: Vec<TensorTerm>,
}

impl SymbolExpr {
    /// Canonicalizes: products are distributed so every factor is a single
    /// term with unit scale, then terms with identical factors are merged.
    pub fn from_terms(n: usize, terms: Vec<TensorTerm>) -> Self {
        let mut expanded: Vec<TensorTerm> = Vec::new();
        for t in terms {
            assert_eq!(t.factors.len(), n, "tensor term dimension");
            if is_crat_zero(&t.coeff) {
                continue;
            }
            let mut partial = vec![TensorTerm { coeff: t.coeff, factors: Vec::with_capacity(n) }];
            for u in &t.factors {
                let mut next = Vec::with_capacity(partial.len() * u.terms.len());
                for p in &partial {
                    for term in &u.terms {
                        let mut factors = p.factors.clone();
                        factors.push(UniSum { terms: vec![UniTerm { scale: crat_one(), ..term.clone() }] });
                        next.push(TensorTerm { coeff: p.coeff.clone() * term.scale.clone(), factors });
                    }
                }
                partial = next;
            }
            expanded.extend(partial);
        }
        expanded.sort_by(|x, y| x.factors.cmp(&y.factors));
        let mut out: Vec<TensorTerm> = Vec::with_capacity(expanded.len());
        for t in expanded {
            match out.last_mut() {
                Some(last) if last.factors == t.factors => last.coeff = last.coeff.clone() + t.coeff,
                _ => out.push(t),
            }
        }
        out.retain(|t| !is_crat_zero(&t.coeff));
        SymbolExpr { n, terms: out }
    }

    pub fn zero(n: usize) -> Self {
        SymbolExpr { n, terms: Vec::new() }
    }

    pub fn constant(n: usize, c: CRat) -> Self {
        Self::from_terms(n, vec![TensorTerm { coeff: c, factors: vec![UniSum::one(); n] }])
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, crat_one())
    }

    /// The symbol `u(z_k)` with `k` 1-based.
    pub fn in_variable(n: usize, k: usize, u: UniSum) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::BadCoordinate { k, n });
        }
        let mut factors = vec![UniSum::one(); n];
        factors[k - 1] = u;
        Ok(Self::from_terms(n, vec![TensorTerm { coeff: crat_one(), factors }]))
    }

    pub fn coord(n: usize, k: usize) -> Result<Self> {
        Self::in_variable(n, k, UniSum::from_terms(vec![UniTerm::monomial(1, 0, crat_one())]))
    }

    pub fn radial(n: usize, k: usize, rho: PiecewiseRadial) -> Result<Self> {
        Self::in_variable(n, k, UniSum::from_terms(vec![UniTerm::new(rho, 0, 0, crat_one())]))
    }

    pub fn tensor(factors: Vec<UniSum>) -> Self {
        let n = factors.len();
        Self::from_terms(n, vec![TensorTerm { coeff: crat_one(), factors }])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[TensorTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_dim(&self, other: &SymbolExpr) {
        assert_eq!(self.n, other.n, "symbol dimensions differ");
    }

    pub fn add(&self, other: &SymbolExpr) -> SymbolExpr {
        self.check_dim(other);
        Self::from_terms(self.n, self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn sub(&self, other: &SymbolExpr) -> SymbolExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SymbolExpr {
        self.scale(&(-crat_one()))
    }

    pub fn mul(&self, other: &SymbolExpr) -> SymbolExpr {
        self.check_dim(other);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for x in &self.terms {
            for y in &other.terms {
                terms.push(TensorTerm {
                    coeff: x.coeff.clone() * y.coeff.clone(),
                    factors: x.factors.iter().zip(&y.factors).map(|(u, v)| u.mul(v)).collect(),
                });
            }
        }
        Self::from_terms(self.n, terms)
    }

    pub fn pow(&self, e: u32) -> SymbolExpr {
        (0..e).fold(Self::one(self.n), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, c: &CRat) -> SymbolExpr {
        Self::from_terms(
            self.n,
            self.terms
                .iter()
                .map(|t| TensorTerm { coeff: t.coeff.clone() * c.clone(), factors: t.factors.clone() })
                .collect(),
        )
    }

    pub fn conj(&self) -> SymbolExpr {
        Self::from_terms(
            self.n,
            self.terms
                .iter()
                .map(|t| TensorTerm { coeff: t.coeff.conj(), factors: t.factors.iter().map(UniSum::conj).collect() })
                .collect(),
        )
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.n, "point dimension");
        self.terms.iter().map(|t| t.eval(z)).sum()
    }

    /// `R_{k, xi}` with symbolic `xi`: the restricted symbol as a Laurent
    /// polynomial `sum_d xi^d S_d` over `n - 1` variables. `k` is 1-based.
    pub fn restrict_laurent(&self, k: usize) -> Result<BTreeMap<i64, SymbolExpr>> {
        if self.n < 2 {
            return Err(Error::Invalid("restriction needs n >= 2".into()));
        }
        if k == 0 || k > self.n {
            return Err(Error::BadCoordinate { k, n: self.n });
        }
        let mut buckets: BTreeMap<i64, Vec<TensorTerm>> = BTreeMap::new();
        for t in &self.terms {
            let mut rest = t.factors.clone();
            let slot = rest.remove(k - 1);
            for (d, c) in slot.circle_laurent() {
                buckets
                    .entry(d)
                    .or_default()
                    .push(TensorTerm { coeff: t.coeff.clone() * c, factors: rest.clone() });
            }
        }
        Ok(buckets
            .into_iter()
            .map(|(d, terms)| (d, Self::from_terms(self.n - 1, terms)))
            .filter(|(_, s)| !s.is_zero())
            .collect())
    }

    /// `R_{k, xi}` at an exact unimodular rational point.
    pub fn restrict(&self, k: usize, xi: &CRat) -> Result<SymbolExpr> {
        if !is_unimodular(xi) {
            return Err(Error::NotUnimodular);
        }
        let laurent = self.restrict_laurent(k)?;
        let mut acc = Self::zero(self.n - 1);
        for (d, s) in laurent {
            acc = acc.add(&s.scale(&crat_unit_pow(xi, d)));
        }
        Ok(acc)
    }

    /// Inserts a constant-1 factor in slot `k` (1-based) of an `n+1`-variable symbol.
    pub fn extend(&self, k: usize) -> Result<SymbolExpr> {
        if k == 0 || k > self.n + 1 {
            return Err(Error::BadCoordinate { k, n: self.n + 1 });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut factors = t.factors.clone();
                factors.insert(k - 1, UniSum::one());
                TensorTerm { coeff: t.coeff.clone(), factors }
            })
            .collect();
        Ok(Self::from_terms(self.n + 1, terms))
    }

    /// Radial breakpoints where some profile jumps, tagged by 1-based variable.
    pub fn discontinuities(&self) -> Vec<(usize, Rat)> {
        let mut out = Vec::new();
        for t in &self.terms {
            for (j, u) in t.factors.iter().enumerate() {
                for d in u.discontinuities() {
                    out.push((j + 1, d));
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn is_boundary_continuous(&self) -> bool {
        self.discontinuities().is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|t| t.factors.iter().all(UniSum::is_polynomial))
    }

    /// Whether the symbol factors as `f_1(z_1) ... f_n(z_n)`.
    pub fn is_pure_tensor(&self) -> bool {
        self.tensor_factors().is_some()
    }

    /// Per-variable factors of a pure tensor, with the coefficient folded into
    /// variable 1. Exact rank-one test: the candidate factor in slot `j` collects
    /// the terms agreeing with the first term off slot `j`.
    pub fn tensor_factors(&self) -> Option<Vec<UniSum>> {
        let Some(pivot) = self.terms.first() else {
            return Some(vec![UniSum::zero(); self.n]);
        };
        let mut factors = Vec::with_capacity(self.n);
        for j in 0..self.n {
            let mut terms = Vec::new();
            for t in &self.terms {
                let agrees = t.factors.iter().zip(&pivot.factors).enumerate().all(|(i, (u, v))| i == j || u == v);
                if agrees {
                    terms.extend(t.factors[j].scale(&(t.coeff.clone() / pivot.coeff.clone())).terms);
                }
            }
            factors.push(UniSum::from_terms(terms));
        }
        factors[0] = factors[0].scale(&pivot.coeff);
        let candidate = Self::tensor(factors.clone());
        (candidate == *self).then_some(factors)
    }

    /// The one-variable symbol as a single [`UniSum`] (requires `n == 1`).
    pub fn as_univariate(&self) -> Option<UniSum> {
        if self.n != 1 {
            return None;
        }
        Some(
            self.terms
                .iter()
                .fold(UniSum::zero(), |acc, t| acc.add(&t.factors[0].scale(&t.coeff))),
        )
    }

    pub fn max_shift(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.factors.iter().map(UniSum::max_shift))
            .max()
            .unwrap_or(0)
    }

    /// Whether the symbol takes only real values: equal to its conjugate.
    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// `1 - |z_k|^2`.
    pub fn one_minus_mod2(n: usize, k: usize) -> Result<Self> {
        let u = UniSum::from_terms(vec![
            UniTerm::monomial(0, 0, crat_one()),
            UniTerm::monomial(1, 1, CRat::new(rat_int(-1), Rat::zero())),
        ]);
        Self::in_variable(n, k, u)
    }
}

impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let negative = t.coeff.im.is_zero() && t.coeff.re.is_negative();
            let coeff = if negative { -t.coeff.clone() } else { t.coeff.clone() };
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut wrote = false;
            if coeff != crat_one() {
                write!(f, "{}", format_crat(&coeff))?;
                wrote = true;
            }
            for (j, u) in t.factors.iter().enumerate() {
                if u.as_constant().is_some_and(|c| c.re.is_one() && c.im.is_zero()) {
                    continue;
                }
                if wrote {
                    write!(f, "*")?;
                }
                if u.terms().len() == 1 {
                    u.write_with_var(f, j + 1)?;
                } else {
                    write!(f, "(")?;
                    u.write_with_var(f, j + 1)?;
                    write!(f, ")")?;
                }
                wrote = true;
            }
            if !wrote {
                write!(f, "1")?;
            }
        }
        Ok(())
    }
}
