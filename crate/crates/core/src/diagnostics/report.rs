//! The full compactness pipeline and its JSON report.

use super::decay::{decay_test, default_targets, DecayVerdict};
use super::slices::{restriction_slice_test, SliceVerdict};
use crate::basis::Truncation;
use crate::berezin::{ApproachSchedule, DecayProfile};
use crate::error::{Error, Result};
use crate::opexpr::OperatorExpr;
use crate::rational::{crat_one, rat_to_f64};
use crate::symbols::{boundary_face_max, BoundaryGrid, SymbolExpr};
use crate::toeplitz::{default_pad, AssemblyMode};
use serde::{Deserialize, Serialize};

/// Run parameters; echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    /// One cap per variable, or a single cap used for all of them.
    pub caps: Vec<usize>,
    /// Padding for products; `None` picks the default from the symbols' degrees.
    pub pad: Option<usize>,
    pub xi_count: usize,
    pub tol_slice: f64,
    pub tol_decay: f64,
    pub ts: Vec<f64>,
    pub seed: u64,
    pub mode: AssemblyMode,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            caps: vec![64],
            pad: None,
            xi_count: 64,
            tol_slice: 1e-8,
            tol_decay: 1e-6,
            ts: ApproachSchedule::DEFAULT_TS.to_vec(),
            seed: 0x5eed,
            mode: AssemblyMode::Exact,
        }
    }
}

impl DiagnosticsConfig {
    pub fn truncation(&self, n: usize) -> Result<Truncation> {
        match self.caps.as_slice() {
            [c] => Truncation::uniform(n, *c),
            caps if caps.len() == n => Truncation::new(caps.to_vec()),
            caps => Err(Error::DimensionMismatch { expected: n, got: caps.len() }),
        }
    }

    pub fn pad_for(&self, expr: &OperatorExpr) -> usize {
        self.pad.unwrap_or_else(|| default_pad(expr))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CompactConsistent,
    NotCompact,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub slice: f64,
    pub decay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceMax {
    pub k: usize,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessReport {
    pub expr: String,
    pub trunc: Vec<usize>,
    pub pad: usize,
    pub tol: Tolerances,
    pub config: DiagnosticsConfig,
    pub slices: Vec<SliceVerdict>,
    pub profiles: Vec<DecayProfile>,
    /// Sampled maxima of the pointwise symbol `sum_i c_i prod_j f_ij` on each face.
    pub face_maxima: Vec<FaceMax>,
    pub verdict: Verdict,
    pub evidence: Vec<String>,
    pub warnings: Vec<String>,
}

impl CompactnessReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `sum_i c_i prod_j f_ij` as a single symbol.
pub fn pointwise_symbol(expr: &OperatorExpr) -> SymbolExpr {
    let n = expr.dim();
    expr.products().iter().fold(SymbolExpr::zero(n), |acc, p| {
        let prod = p.factors.iter().fold(SymbolExpr::constant(n, crat_one()), |a, f| a.mul(f));
        acc.add(&prod.scale(&p.coeff))
    })
}

fn continuity_warnings(expr: &OperatorExpr) -> Vec<String> {
    let mut out = Vec::new();
    for f in expr.symbols() {
        for (j, r) in f.discontinuities() {
            out.push(format!("symbol {f} is discontinuous in variable {j} at r = {}", rat_to_f64(&r)));
        }
    }
    out.dedup();
    out
}

/// Slice test, decay test and face maxima combined into one verdict.
///
/// `not-compact` needs a certified nonzero slice norm or a non-decaying
/// reliable profile; `compact-consistent` needs every sampled slice below
/// the slice tolerance. Disagreement between the two tests is reported as
/// inconclusive rather than resolved.
pub fn analyze(expr: &OperatorExpr, config: &DiagnosticsConfig) -> Result<CompactnessReport> {
    let n = expr.dim();
    let trunc = config.truncation(n)?;
    let pad = config.pad_for(expr);
    let warnings = continuity_warnings(expr);
    let mut evidence = Vec::new();

    let slices = if n >= 2 { restriction_slice_test(expr, config.xi_count, &trunc, pad, config.mode)? } else { Vec::new() };
    let decay = decay_test(expr, &default_targets(n), &config.ts, &trunc, pad, config.tol_decay, config.mode)?;

    let symbol = pointwise_symbol(expr);
    let grid = BoundaryGrid::default();
    let face_maxima: Vec<FaceMax> = (1..=n).map(|k| FaceMax { k, max: boundary_face_max(&symbol, k, &grid) }).collect();

    let certified_nonzero: Vec<&SliceVerdict> =
        slices.iter().filter(|s| s.certified && !s.exact_zero && s.norm > config.tol_slice).collect();
    let all_small = slices.iter().all(|s| s.exact_zero || s.norm <= config.tol_slice);
    let all_exact = slices.iter().all(|s| s.exact_zero);

    if let Some(best) = certified_nonzero.iter().max_by(|a, b| a.norm.total_cmp(&b.norm)) {
        evidence.push(format!(
            "certified nonzero slice: k = {}, xi = ({:.6}, {:.6}), norm {:e} > {:e} ({} of {} sampled slices)",
            best.k,
            best.xi_re,
            best.xi_im,
            best.norm,
            config.tol_slice,
            certified_nonzero.len(),
            slices.len()
        ));
    } else if n >= 2 && all_exact {
        evidence.push(format!("every slice operator is exactly zero at caps {:?} (pad {pad})", trunc.caps()));
    } else if n >= 2 && all_small {
        evidence.push(format!("every sampled slice norm is at most {:e}", config.tol_slice));
        if expr.products().iter().any(|p| p.factors.len() > 1) {
            evidence.push(
                "a vanishing slice product of Toeplitz operators is not read as vanishing of the symbol product; \
                 that inference is the open zero-product problem"
                    .into(),
            );
        }
    } else if n >= 2 {
        evidence.push("some slice norms exceed tolerance but padding does not certify them".into());
    }

    for &i in &decay.obstructions {
        let p = &decay.profiles[i];
        evidence.push(format!(
            "Berezin transform does not decay towards {:?}: reliable tail {:e}",
            p.target.iter().map(|c| (c.re, c.im)).collect::<Vec<_>>(),
            p.tail().unwrap_or(f64::NAN)
        ));
    }
    if decay.verdict == DecayVerdict::NoObstruction {
        evidence.push(format!("no decay obstruction on {} approach paths", decay.profiles.len()));
    }
    if decay.profiles.iter().all(|p| p.reliable().count() < 2) {
        evidence.push("fewer than two reliable samples per profile; decay evidence is weak at this truncation".into());
    }

    let decay_flags = decay.verdict == DecayVerdict::NotCompact;
    let verdict = if n == 1 {
        evidence.push("one variable: only the decay test applies".into());
        if decay_flags {
            Verdict::NotCompact
        } else {
            Verdict::CompactConsistent
        }
    } else if !certified_nonzero.is_empty() {
        Verdict::NotCompact
    } else if all_small {
        if decay_flags {
            evidence.push("conflict: slices vanish but the Berezin transform does not decay".into());
            Verdict::Inconclusive
        } else {
            Verdict::CompactConsistent
        }
    } else if decay_flags {
        Verdict::NotCompact
    } else {
        Verdict::Inconclusive
    };

    Ok(CompactnessReport {
        expr: expr.to_string(),
        trunc: trunc.caps().to_vec(),
        pad,
        tol: Tolerances { slice: config.tol_slice, decay: config.tol_decay },
        config: config.clone(),
        slices,
        profiles: decay.profiles,
        face_maxima,
        verdict,
        evidence,
        warnings,
    })
}
