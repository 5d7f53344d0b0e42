//! Piecewise-polynomial radial profiles with exact rational data.

use crate::error::{Error, Result};
use crate::rational::{format_rat, rat_int, rat_pow, rat_to_f64, Rat};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Polynomial in `r` with ascending rational coefficients; no trailing zeros.
pub type RPoly = Vec<Rat>;

pub fn rpoly_trim(p: &mut RPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn rpoly_eval(p: &[Rat], r: &Rat) -> Rat {
    p.iter().rev().fold(Rat::zero(), |acc, c| acc * r + c)
}

pub fn rpoly_mul(a: &[Rat], b: &[Rat]) -> RPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    rpoly_trim(&mut out);
    out
}

pub fn rpoly_add(a: &[Rat], b: &[Rat]) -> RPoly {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    rpoly_trim(&mut out);
    out
}

pub fn format_rpoly(p: &[Rat]) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let mag = c.abs();
        let body = match k {
            0 => format_rat(&mag),
            _ => {
                let rp = if k == 1 { "r".to_string() } else { format!("r^{k}") };
                if mag.is_one() {
                    rp
                } else {
                    format!("{}*{}", format_rat(&mag), rp)
                }
            }
        };
        s.push_str(&body);
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RadialPiece {
    pub lo: Rat,
    pub hi: Rat,
    pub poly: RPoly,
}

/// `rho(r)` on `[0, 1]` given by polynomial pieces on a rational partition.
#[derive(Debug, Clone)]
pub struct PiecewiseRadial {
    pieces: Vec<RadialPiece>,
    float: Vec<(f64, f64, Vec<f64>)>,
}

impl PartialEq for PiecewiseRadial {
    fn eq(&self, other: &Self) -> bool {
        self.pieces == other.pieces
    }
}
impl Eq for PiecewiseRadial {}
impl PartialOrd for PiecewiseRadial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PiecewiseRadial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.pieces.cmp(&other.pieces)
    }
}

impl PiecewiseRadial {
    /// Validates that the pieces partition `[0, 1]`, then merges adjacent
    /// pieces carrying the same polynomial.
    pub fn new(pieces: Vec<RadialPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidRadial("no pieces".into()));
        }
        if !pieces[0].lo.is_zero() {
            return Err(Error::InvalidRadial("first piece must start at 0".into()));
        }
        if !pieces.last().unwrap().hi.is_one() {
            return Err(Error::InvalidRadial("last piece must end at 1".into()));
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::InvalidRadial(format!(
                    "gap or overlap at {} / {}",
                    format_rat(&w[0].hi),
                    format_rat(&w[1].lo)
                )));
            }
        }
        if let Some(p) = pieces.iter().find(|p| p.lo >= p.hi) {
            return Err(Error::InvalidRadial(format!(
                "empty interval [{}, {}]",
                format_rat(&p.lo),
                format_rat(&p.hi)
            )));
        }
        let mut merged: Vec<RadialPiece> = Vec::with_capacity(pieces.len());
        for mut p in pieces {
            rpoly_trim(&mut p.poly);
            match merged.last_mut() {
                Some(last) if last.poly == p.poly => last.hi = p.hi,
                _ => merged.push(p),
            }
        }
        Ok(Self::from_valid(merged))
    }

    fn from_valid(pieces: Vec<RadialPiece>) -> Self {
        let float = pieces
            .iter()
            .map(|p| (rat_to_f64(&p.lo), rat_to_f64(&p.hi), p.poly.iter().map(rat_to_f64).collect()))
            .collect();
        PiecewiseRadial { pieces, float }
    }

    pub fn polynomial(mut poly: RPoly) -> Self {
        rpoly_trim(&mut poly);
        Self::from_valid(vec![RadialPiece { lo: Rat::zero(), hi: Rat::one(), poly }])
    }

    pub fn constant(c: Rat) -> Self {
        Self::polynomial(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn pieces(&self) -> &[RadialPiece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].poly.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].poly.len() == 1 && self.pieces[0].poly[0].is_one()
    }

    /// The polynomial when the profile is a single piece on `[0, 1]`.
    pub fn as_global_poly(&self) -> Option<&RPoly> {
        (self.pieces.len() == 1).then(|| &self.pieces[0].poly)
    }

    /// Interior breakpoints in increasing order.
    pub fn breakpoints(&self) -> Vec<Rat> {
        self.pieces.iter().skip(1).map(|p| p.lo.clone()).collect()
    }

    pub fn breakpoints_f64(&self) -> Vec<f64> {
        self.float.iter().skip(1).map(|p| p.0).collect()
    }

    /// Breakpoints where the adjacent pieces disagree.
    pub fn discontinuities(&self) -> Vec<Rat> {
        self.pieces
            .windows(2)
            .filter(|w| rpoly_eval(&w[0].poly, &w[0].hi) != rpoly_eval(&w[1].poly, &w[1].lo))
            .map(|w| w[0].hi.clone())
            .collect()
    }

    pub fn is_continuous(&self) -> bool {
        self.discontinuities().is_empty()
    }

    fn piece_index(&self, r: f64) -> usize {
        self.float.iter().position(|p| r <= p.1).unwrap_or(self.float.len() - 1)
    }

    pub fn eval(&self, r: f64) -> f64 {
        let (_, _, poly) = &self.float[self.piece_index(r)];
        poly.iter().rev().fold(0.0, |acc, c| acc * r + c)
    }

    pub fn eval_exact(&self, r: &Rat) -> Rat {
        let piece = self.pieces.iter().find(|p| r <= &p.hi).unwrap_or_else(|| self.pieces.last().unwrap());
        rpoly_eval(&piece.poly, r)
    }

    /// Boundary value `rho(1)`.
    pub fn value_at_one(&self) -> Rat {
        rpoly_eval(&self.pieces.last().unwrap().poly, &Rat::one())
    }

    fn map_pieces(&self, f: impl Fn(&RPoly) -> RPoly) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| RadialPiece { lo: p.lo.clone(), hi: p.hi.clone(), poly: f(&p.poly) })
            .collect();
        Self::new(pieces).expect("partition preserved")
    }

    pub fn scale(&self, c: &Rat) -> Self {
        self.map_pieces(|p| {
            let mut q: RPoly = p.iter().map(|x| x * c).collect();
            rpoly_trim(&mut q);
            q
        })
    }

    /// Multiplies by `r^{2j}`.
    pub fn mul_r2(&self, j: u32) -> Self {
        if j == 0 {
            return self.clone();
        }
        self.map_pieces(|p| {
            if p.is_empty() {
                return Vec::new();
            }
            let mut q = vec![Rat::zero(); 2 * j as usize];
            q.extend(p.iter().cloned());
            q
        })
    }

    fn combine(&self, other: &Self, f: impl Fn(&RPoly, &RPoly) -> RPoly) -> Self {
        let mut cuts: Vec<Rat> = self.breakpoints();
        cuts.extend(other.breakpoints());
        cuts.sort();
        cuts.dedup();
        let mut edges = vec![Rat::zero()];
        edges.extend(cuts);
        edges.push(Rat::one());
        let two = rat_int(2);
        let pieces = edges
            .windows(2)
            .map(|w| {
                let mid = (&w[0] + &w[1]) / &two;
                let a = self.pieces.iter().find(|p| mid < p.hi).unwrap();
                let b = other.pieces.iter().find(|p| mid < p.hi).unwrap();
                RadialPiece { lo: w[0].clone(), hi: w[1].clone(), poly: f(&a.poly, &b.poly) }
            })
            .collect();
        Self::new(pieces).expect("refined partition is valid")
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, |a, b| rpoly_mul(a, b))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| rpoly_add(a, b))
    }

    /// Exact `2 * int_0^1 rho(r) r^{2k+1} dr`.
    pub fn moment(&self, k: usize) -> Rat {
        let mut total = Rat::zero();
        for p in &self.pieces {
            for (j, c) in p.poly.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = (j + 2 * k + 2) as u32;
                let diff = rat_pow(&p.hi, e) - rat_pow(&p.lo, e);
                total += c * diff / rat_int(e as i64);
            }
        }
        total * rat_int(2)
    }

    /// Floating-point moment for large `k` where exact powers get expensive.
    pub fn moment_f64(&self, k: usize) -> f64 {
        let mut total = 0.0;
        for (lo, hi, poly) in &self.float {
            for (j, c) in poly.iter().enumerate() {
                if *c == 0.0 {
                    continue;
                }
                let e = (j + 2 * k + 2) as i32;
                total += c * (hi.powi(e) - lo.powi(e)) / e as f64;
            }
        }
        2.0 * total
    }

    /// First nonzero coefficient, scanning pieces left to right and each
    /// polynomial from the constant term up. Zero for the zero profile.
    pub fn leading_coefficient(&self) -> Rat {
        self.pieces
            .iter()
            .flat_map(|p| p.poly.iter())
            .find(|c| !c.is_zero())
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(|p| p.poly.len().saturating_sub(1)).max().unwrap_or(0)
    }
}

impl fmt::Display for PiecewiseRadial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| format!("[{},{}]: {}", format_rat(&p.lo), format_rat(&p.hi), format_rpoly(&p.poly)))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}
