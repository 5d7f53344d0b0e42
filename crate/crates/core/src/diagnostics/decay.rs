//! Berezin boundary decay as a non-compactness falsifier.
//!
//! A compact operator has `B T(p) -> 0` as `p` approaches the boundary. The
//! truncated transform is trusted only while the kernel mass stays inside the
//! truncation, so a profile obstructs compactness when its reliable samples
//! show no decay: the last one still exceeds `tol` and keeps at least
//! [`FLAT_RATIO`] of the largest reliable value.

use crate::basis::Truncation;
use crate::berezin::{profile_of, ApproachSchedule, DecayProfile};
use crate::error::Result;
use crate::opexpr::OperatorExpr;
use crate::toeplitz::{compose, AssemblyMode};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const FLAT_RATIO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayVerdict {
    NotCompact,
    NoObstruction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayOutcome {
    pub profiles: Vec<DecayProfile>,
    /// Indices into `profiles` of the non-decaying ones.
    pub obstructions: Vec<usize>,
    pub verdict: DecayVerdict,
}

/// Whether a profile's reliable part fails to decay.
pub fn is_obstruction(profile: &DecayProfile, tol: f64) -> bool {
    let reliable: Vec<f64> = profile.reliable().map(|s| s.abs_bt).collect();
    if reliable.len() < 2 {
        return false;
    }
    let tail = *reliable.last().unwrap();
    let max = reliable.iter().cloned().fold(0.0, f64::max);
    tail > tol && tail >= FLAT_RATIO * max
}

/// Face points `xi e_k` for `xi` in `{1, i, -1}` and the corners `(1, ..., 1)`, `(-1, ..., -1)`.
pub fn default_targets(n: usize) -> Vec<Vec<Complex64>> {
    let zero = Complex64::new(0.0, 0.0);
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    for k in 0..n {
        for xi in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0)] {
            let mut q = vec![zero; n];
            q[k] = xi;
            out.push(q);
        }
    }
    for s in [1.0, -1.0] {
        let q = vec![Complex64::new(s, 0.0); n];
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

pub fn decay_test(
    expr: &OperatorExpr,
    targets: &[Vec<Complex64>],
    ts: &[f64],
    trunc: &Truncation,
    pad: usize,
    tol: f64,
    mode: AssemblyMode,
) -> Result<DecayOutcome> {
    let op = compose(expr, trunc, pad, mode)?;
    let anchor = vec![Complex64::new(0.0, 0.0); trunc.dim()];
    let profiles = targets
        .par_iter()
        .map(|q| profile_of(&op, &ApproachSchedule::with_params(q.clone(), anchor.clone(), ts.to_vec())?, pad))
        .collect::<Result<Vec<_>>>()?;
    let obstructions: Vec<usize> = (0..profiles.len()).filter(|&i| is_obstruction(&profiles[i], tol)).collect();
    let verdict = if obstructions.is_empty() { DecayVerdict::NoObstruction } else { DecayVerdict::NotCompact };
    Ok(DecayOutcome { profiles, obstructions, verdict })
}
