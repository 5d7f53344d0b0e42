//! Berezin transforms `B T(p) = <T k_p, k_p>` of symbols and truncated
//! operators, and sampled approaches to the distinguished boundary.

use crate::basis::{kernel_coeffs, kernel_coeffs_1d, kernel_mass_defect, Point, Truncation};
use crate::error::{Error, Result};
use crate::opexpr::OperatorExpr;
use crate::quadops::{DiscRule, RadialRule};
use crate::rational::crat_to_c64;
use crate::symbols::{SymbolExpr, UniSum};
use crate::toeplitz::{compose, AssemblyMode, OperatorMatrix, TensorOperator};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Kernel mass allowed to escape the truncation before a sample is unreliable.
pub const RELIABILITY_THRESHOLD: f64 = 1e-6;

/// `|k_p(z)|^2` for the normalized one-variable kernel.
fn kernel_density(p: Complex64, z: Complex64) -> f64 {
    let s = 1.0 - p.norm_sqr();
    s * s / (Complex64::new(1.0, 0.0) - z * p.conj()).norm_sqr().powi(2)
}

/// Radial panel cuts graded towards `|p|` so the kernel peak is resolved.
fn graded_breaks(u: &UniSum, p: Complex64) -> Vec<f64> {
    let mut b = u.breakpoints_f64();
    let rho = p.norm();
    let gap = 1.0 - rho;
    for j in -2..=12 {
        let h = gap * 2f64.powi(j);
        for c in [rho - h, rho + h] {
            if c > 0.0 && c < 1.0 {
                b.push(c);
            }
        }
    }
    b.push(rho);
    b
}

/// Angular count for the kernel density: its Fourier modes decay like `|p|^k`,
/// so `37 / -ln|p|` modes reach double precision; add the symbol's degree.
fn angular_count(u: &UniSum, p: Complex64) -> usize {
    let rho = p.norm();
    let kernel = if rho < 1e-3 { 8.0 } else { 37.0 / -rho.ln() };
    (kernel.ceil() as usize).max(8) + 2 * u.angular_degree() + 1
}

/// `int_D u |k_p|^2 dnu` by graded polar quadrature; constants are exact.
pub fn berezin_unisum(u: &UniSum, p: Complex64, radial: &RadialRule) -> Complex64 {
    if let Some(c) = u.as_constant() {
        return crat_to_c64(&c);
    }
    let rule = DiscRule { radial: radial.clone(), q_theta: angular_count(u, p) };
    rule.nodes(&graded_breaks(u, p)).into_iter().map(|(z, w)| u.eval(z) * (kernel_density(p, z) * w)).sum()
}

/// `B T_f (p) = int f |k_p|^2 dnu` by quadrature, term by term over the tensor structure.
pub fn berezin_symbol(f: &SymbolExpr, p: &Point, q_r: usize) -> Result<Complex64> {
    check(f.dim(), p)?;
    let radial = crate::quadops::gauss_legendre(q_r)?;
    Ok(f.terms()
        .iter()
        .map(|t| {
            t.factors.iter().zip(&p.coords).map(|(u, &pj)| berezin_unisum(u, pj, &radial)).product::<Complex64>()
                * crat_to_c64(&t.coeff)
        })
        .sum())
}

/// The same transform from the Toeplitz series: for a term `c rho z^a conj(z)^b`,
/// `(1 - |p|^2)^2 sum_m (m+1)(l+1) moment(rho, m + a) conj(p)^m p^l` with
/// `l = m + a - b`, summed until the tail is below double precision.
pub fn berezin_unisum_series(u: &UniSum, p: Complex64) -> Complex64 {
    if let Some(c) = u.as_constant() {
        return crat_to_c64(&c);
    }
    let x = p.norm_sqr();
    let s = 1.0 - x;
    let mut total = Complex64::new(0.0, 0.0);
    let rho = p.norm();
    for t in u.terms() {
        let (a, b) = (t.a as usize, t.b as usize);
        let m0 = b.saturating_sub(a);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut m = m0;
        let mut pm = p.conj().powu(m0 as u32);
        let mut pl = p.powu((m0 + a - b) as u32);
        loop {
            let l = m + a - b;
            let weight = ((m + 1) * (l + 1)) as f64;
            sum += pm * pl * (weight * t.radial.moment_f64(m + a));
            // Moments are at most 1, so the geometric tail is bounded by this.
            let tail = weight * rho.powi((m + l) as i32) / s;
            if tail < 1e-17 * sum.norm() || tail < 1e-300 {
                break;
            }
            m += 1;
            pm *= p.conj();
            pl *= p;
        }
        total += crat_to_c64(&t.scale) * sum;
    }
    total * (s * s)
}

pub fn berezin_symbol_series(f: &SymbolExpr, p: &Point) -> Result<Complex64> {
    check(f.dim(), p)?;
    Ok(f.terms()
        .iter()
        .map(|t| {
            t.factors.iter().zip(&p.coords).map(|(u, &pj)| berezin_unisum_series(u, pj)).product::<Complex64>()
                * crat_to_c64(&t.coeff)
        })
        .sum())
}

fn check(n: usize, p: &Point) -> Result<()> {
    if p.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.dim() });
    }
    p.require_interior()
}

/// `<A k_p, k_p>` with `k_p` truncated to `A`'s truncation.
pub fn berezin_operator(a: &OperatorMatrix, p: &Point) -> Result<Complex64> {
    check(a.trunc.dim(), p)?;
    let k = kernel_coeffs(p, &a.trunc)?;
    let v = ndarray::Array1::from(k.coeffs.clone());
    let av = a.apply(&v);
    Ok(av.iter().zip(v.iter()).map(|(x, y)| x * y.conj()).sum())
}

/// `<A k_p, k_p>` for a tensor-structured operator; the kernel factorizes.
pub fn berezin_tensor(a: &TensorOperator, p: &Point) -> Result<Complex64> {
    check(a.trunc.dim(), p)?;
    let ks: Vec<Vec<Complex64>> =
        p.coords.iter().zip(a.trunc.caps()).map(|(&pj, &c)| kernel_coeffs_1d(pj, c)).collect();
    Ok(a.quadratic_form_product(&ks))
}

/// Straight path `p(t) = (1 - t) anchor + t target` towards a boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachSchedule {
    pub target: Vec<Complex64>,
    pub anchor: Vec<Complex64>,
    pub ts: Vec<f64>,
}

impl ApproachSchedule {
    pub const DEFAULT_TS: [f64; 7] = [0.5, 0.75, 0.9, 0.95, 0.975, 0.99, 0.995];

    /// Path from the origin with the default parameters.
    pub fn new(target: Vec<Complex64>) -> Result<Self> {
        let n = target.len();
        Self::with_params(target, vec![Complex64::new(0.0, 0.0); n], Self::DEFAULT_TS.to_vec())
    }

    pub fn with_params(target: Vec<Complex64>, anchor: Vec<Complex64>, ts: Vec<f64>) -> Result<Self> {
        if anchor.len() != target.len() {
            return Err(Error::DimensionMismatch { expected: target.len(), got: anchor.len() });
        }
        let tol = 1e-12;
        if target.iter().any(|q| q.norm() > 1.0 + tol) || target.iter().all(|q| q.norm() < 1.0 - tol) {
            return Err(Error::Invalid("schedule target must lie on the boundary of the polydisc".into()));
        }
        Point::new(anchor.clone()).require_interior()?;
        if ts.is_empty() || ts.iter().any(|&t| !(0.0..1.0).contains(&t)) || ts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("schedule parameters must increase strictly inside [0, 1)".into()));
        }
        Ok(ApproachSchedule { target, anchor, ts })
    }

    pub fn point(&self, t: f64) -> Point {
        Point::new(self.anchor.iter().zip(&self.target).map(|(a, q)| a * (1.0 - t) + q * t).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub t: f64,
    pub p: Vec<Complex64>,
    pub abs_bt: f64,
    pub kernel_mass_defect: f64,
    pub reliable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub target: Vec<Complex64>,
    pub caps: Vec<usize>,
    pub pad: usize,
    pub samples: Vec<DecaySample>,
}

impl DecayProfile {
    /// Samples whose kernel mass stays inside the truncation.
    pub fn reliable(&self) -> impl Iterator<Item = &DecaySample> {
        self.samples.iter().filter(|s| s.reliable)
    }

    /// `|B T|` at the reliable sample closest to the boundary.
    pub fn tail(&self) -> Option<f64> {
        self.reliable().last().map(|s| s.abs_bt)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for j in 1..=self.target.len() {
            let _ = write!(s, ",p{j}_re,p{j}_im");
        }
        s.push_str(",abs_bt,kernel_mass_defect,reliable\n");
        for x in &self.samples {
            let _ = write!(s, "{}", x.t);
            for c in &x.p {
                let _ = write!(s, ",{},{}", c.re, c.im);
            }
            let _ = writeln!(s, ",{},{},{}", x.abs_bt, x.kernel_mass_defect, x.reliable);
        }
        s
    }
}

/// `|B T(p(t))|` along the schedule for a truncated operator.
pub fn profile_of(op: &TensorOperator, schedule: &ApproachSchedule, pad: usize) -> Result<DecayProfile> {
    if schedule.target.len() != op.trunc.dim() {
        return Err(Error::DimensionMismatch { expected: op.trunc.dim(), got: schedule.target.len() });
    }
    let samples = schedule
        .ts
        .par_iter()
        .map(|&t| {
            let p = schedule.point(t);
            let bt = berezin_tensor(op, &p)?;
            let defect = kernel_mass_defect(&p, &op.trunc);
            Ok(DecaySample { t, p: p.coords, abs_bt: bt.norm(), kernel_mass_defect: defect, reliable: defect <= RELIABILITY_THRESHOLD })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayProfile { target: schedule.target.clone(), caps: op.trunc.caps().to_vec(), pad, samples })
}

pub fn decay_profile(
    expr: &OperatorExpr,
    schedule: &ApproachSchedule,
    trunc: &Truncation,
    pad: usize,
    mode: AssemblyMode,
) -> Result<DecayProfile> {
    let op = compose(expr, trunc, pad, mode)?;
    profile_of(&op, schedule, pad)
}
