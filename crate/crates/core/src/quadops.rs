//! Polar quadrature on the unit disc for the normalized measure
//! `dnu = dA / pi` and exact radial moments.

use crate::error::{Error, Result};
use crate::rational::Rat;
use crate::symbols::{PiecewiseRadial, SymbolExpr};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Gauss-Legendre rule on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// `int_lo^hi g(r) dr`.
    pub fn integrate<T>(&self, lo: f64, hi: f64, mut g: impl FnMut(f64) -> T) -> T
    where
        T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
    {
        let h = hi - lo;
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| g(lo + h * x) * (w * h)).sum()
    }
}

/// Product rule: composite Gauss-Legendre in `r`, equispaced trapezoid in `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscRule {
    pub radial: RadialRule,
    pub q_theta: usize,
}

impl DiscRule {
    pub fn new(q_r: usize, q_theta: usize) -> Result<Self> {
        if q_theta == 0 {
            return Err(Error::Invalid("angular point count must be >= 1".into()));
        }
        Ok(DiscRule { radial: gauss_legendre(q_r)?, q_theta })
    }

    /// Nodes and weights on the disc for `nu`, with the radial rule applied on
    /// each panel between consecutive breakpoints. Weights sum to 1.
    pub fn nodes(&self, breakpoints: &[f64]) -> Vec<(Complex64, f64)> {
        let panels = panels(breakpoints);
        let mut out = Vec::with_capacity(panels.len() * self.radial.order() * self.q_theta);
        let wt = 1.0 / self.q_theta as f64;
        for (lo, hi) in panels {
            let h = hi - lo;
            for (&x, &w) in self.radial.nodes.iter().zip(&self.radial.weights) {
                let r = lo + h * x;
                let wr = 2.0 * r * w * h * wt;
                for j in 0..self.q_theta {
                    out.push((Complex64::from_polar(r, TAU * j as f64 / self.q_theta as f64), wr));
                }
            }
        }
        out
    }
}

/// Panels of `[0, 1]` cut at the interior breakpoints.
pub fn panels(breakpoints: &[f64]) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&b| b > 0.0 && b < 1.0).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut lo = 0.0;
    for c in cuts {
        out.push((lo, c));
        lo = c;
    }
    out.push((lo, 1.0));
    out
}

/// Legendre `P_q(x)` and its derivative by the three-term recurrence.
fn legendre(q: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=q {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`; weights sum to 1.
pub fn gauss_legendre(q: usize) -> Result<RadialRule> {
    if q == 0 {
        return Err(Error::Invalid("quadrature order must be >= 1".into()));
    }
    if q == 1 {
        return Ok(RadialRule { nodes: vec![0.5], weights: vec![1.0] });
    }
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..q.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(q, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(q, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root on [-1, 1]; mirror for the smaller one.
        nodes[q - 1 - i] = 0.5 * (1.0 + x);
        nodes[i] = 0.5 * (1.0 - x);
        weights[q - 1 - i] = 0.5 * w;
        weights[i] = 0.5 * w;
    }
    Ok(RadialRule { nodes, weights })
}

/// Angular point count that integrates `f` exactly in `theta`.
pub fn auto_q_theta(f: &SymbolExpr) -> usize {
    f.terms()
        .iter()
        .flat_map(|t| t.factors.iter().map(|u| u.angular_degree()))
        .max()
        .unwrap_or(0)
        + 1
}

/// `int_D f dnu` for a one-variable symbol.
pub fn disc_integral(f: &SymbolExpr, rule: &DiscRule) -> Complex64 {
    assert_eq!(f.dim(), 1, "disc_integral takes a one-variable symbol");
    let breaks: Vec<f64> = f.terms().iter().flat_map(|t| t.factors[0].breakpoints_f64()).collect();
    rule.nodes(&breaks).into_iter().map(|(z, w)| f.eval(&[z]) * w).sum()
}

/// `2 int_0^1 rho(r) r^{2k+1} dr`, exactly.
pub fn exact_radial_moment(rho: &PiecewiseRadial, k: usize) -> Rat {
    rho.moment(k)
}
