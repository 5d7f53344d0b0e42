//! The worked examples: `T_f T_g` with `f = phi(w)`, `g = psi(w)` (so `fg = 0`
//! everywhere), with `g = phi(z) + psi(w)` (so `fg = 0` only on the boundary),
//! and the compact operator `T_{(1-|z|^2)(1-|w|^2)}`.

use super::report::{analyze, CompactnessReport, DiagnosticsConfig, Verdict};
use super::slices::slice_at_exact;
use crate::basis::Truncation;
use crate::catalog::{bidisc_defining, psi_profile};
use crate::error::{Error, Result};
use crate::opexpr::OperatorExpr;
use crate::rational::{crat_one, rat, rat_to_f64, Rat};
use crate::symbols::{closed_disc_max, PiecewiseRadial, SymbolExpr};
use crate::toeplitz::ScaledBandMatrix;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact lower bound for the slice norm: the `(0, 0)` entry `lambda_0 mu_0 = 5/144`
/// exceeds it.
pub fn slice_lower_bound() -> Rat {
    rat(17, 576)
}

const EIGEN_RANGE: usize = 50;
const BOUND_CAPS: [usize; 3] = [16, 32, 64];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleResult {
    pub name: String,
    pub expr: String,
    pub report: Option<CompactnessReport>,
    pub claims: Vec<Claim>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleBundle {
    pub config: DiagnosticsConfig,
    pub examples: Vec<ExampleResult>,
    pub warnings: Vec<String>,
}

impl ExampleBundle {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn failed_claims(&self) -> impl Iterator<Item = (&str, &Claim)> {
        self.examples.iter().flat_map(|e| e.claims.iter().filter(|c| !c.passed).map(move |c| (e.name.as_str(), c)))
    }

    /// `Err(ClaimFailed)` naming the first failed claim.
    pub fn check(&self) -> Result<()> {
        match self.failed_claims().next() {
            Some((ex, c)) => Err(Error::ClaimFailed(format!("{ex}: {} ({})", c.name, c.detail))),
            None => Ok(()),
        }
    }
}

fn claim(name: &str, passed: bool, detail: String) -> Claim {
    Claim { name: name.into(), passed, detail }
}

/// Runs `analyze`, turning a refusal into a failed claim.
fn run(expr: &OperatorExpr, config: &DiagnosticsConfig, claims: &mut Vec<Claim>) -> Result<Option<CompactnessReport>> {
    match analyze(expr, config) {
        Ok(r) => Ok(Some(r)),
        Err(Error::Refusal(msg)) => {
            claims.push(claim("pipeline runs", false, msg));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn slice_claims(report: &Option<CompactnessReport>, claims: &mut Vec<Claim>) {
    let Some(r) = report else { return };
    let bound = rat_to_f64(&slice_lower_bound());
    let k1: Vec<_> = r.slices.iter().filter(|s| s.k == 1).collect();
    let min = k1.iter().map(|s| s.norm).fold(f64::INFINITY, f64::min);
    claims.push(claim(
        "k = 1 slices are certified and bounded below by 17/576",
        !k1.is_empty() && k1.iter().all(|s| s.certified) && min >= bound,
        format!("smallest k = 1 slice norm {min} over {} samples", k1.len()),
    ));
    claims.push(claim(
        "verdict is not compact",
        r.verdict == Verdict::NotCompact,
        format!("verdict {:?}", r.verdict),
    ));
}

/// `||T_phi T_psi||` on one variable at several caps, via the exact `k = 1`
/// slice at `xi = 1`.
fn bound_claim(expr: &OperatorExpr, seed: u64) -> Result<Claim> {
    let bound = rat_to_f64(&slice_lower_bound());
    let mut norms = Vec::new();
    for cap in BOUND_CAPS {
        let trunc = Truncation::uniform(2, cap)?;
        let op = slice_at_exact(expr, 1, &crat_one(), &trunc, 0)?;
        norms.push(op.to_float().operator_norm(1e-12, seed)?);
    }
    Ok(claim(
        "norm of T_phi T_psi is at least 17/576 at caps 16, 32, 64",
        norms.iter().all(|&x| x >= bound),
        format!("norms {norms:?}"),
    ))
}

/// Diagonal entries `lambda_m` of a radial Toeplitz operator, exactly.
pub fn radial_eigenvalues(profile: &PiecewiseRadial, count: usize) -> Vec<Rat> {
    let u = SymbolExpr::radial(1, 1, profile.clone()).expect("slot 1").as_univariate().expect("univariate");
    ScaledBandMatrix::from_unisum(&u, count)
        .diagonal_entries()
        .expect("radial symbols are diagonal")
        .into_iter()
        .map(|c| c.re)
        .collect()
}

pub fn build_examples(config: &DiagnosticsConfig, phi: &PiecewiseRadial) -> Result<ExampleBundle> {
    let psi = psi_profile();
    let phi_z = SymbolExpr::radial(2, 1, phi.clone())?;
    let phi_w = SymbolExpr::radial(2, 2, phi.clone())?;
    let psi_w = SymbolExpr::radial(2, 2, psi.clone())?;
    let mut warnings = Vec::new();
    for (j, r) in SymbolExpr::radial(1, 1, phi.clone())?.discontinuities() {
        warnings.push(format!("phi is discontinuous in variable {j} at r = {}; the slice criterion does not apply", rat_to_f64(&r)));
    }
    let mut examples = Vec::new();

    // fg = 0 on the whole bidisc, T_f T_g not compact.
    {
        let expr = OperatorExpr::product(vec![phi_w.clone(), psi_w.clone()])?;
        let mut claims = Vec::new();
        let prod = SymbolExpr::radial(1, 1, phi.clone())?.mul(&SymbolExpr::radial(1, 1, psi.clone())?);
        let m = closed_disc_max(&prod, 400, 64);
        claims.push(claim("phi psi vanishes on the closed disc", m < 1e-15, format!("sampled max {m:e}")));
        let lambda = radial_eigenvalues(phi, EIGEN_RANGE + 1);
        let mu = radial_eigenvalues(&psi, EIGEN_RANGE + 1);
        let first_bad = (0..=EIGEN_RANGE).find(|&m| !lambda[m].is_positive() || !mu[m].is_positive());
        claims.push(claim(
            "lambda_m, mu_m > 0 for m <= 50",
            first_bad.is_none(),
            match first_bad {
                Some(m) => format!("fails at m = {m}"),
                None => "all positive (exact)".into(),
            },
        ));
        let l0m0 = &lambda[0] * &mu[0];
        claims.push(claim(
            "<T_phi T_psi e_0, e_0> = lambda_0 mu_0 exceeds 17/576",
            l0m0 > slice_lower_bound(),
            format!("lambda_0 mu_0 = {}", crate::rational::format_rat(&l0m0)),
        ));
        claims.push(bound_claim(&expr, config.seed)?);
        let report = run(&expr, config, &mut claims)?;
        if let Some(r) = &report {
            let k2 = r.slices.iter().filter(|s| s.k == 2);
            claims.push(claim(
                "k = 2 slices are exactly zero",
                k2.clone().all(|s| s.exact_zero),
                format!("{} samples", k2.count()),
            ));
        }
        slice_claims(&report, &mut claims);
        examples.push(ExampleResult { name: "fg vanishes identically".into(), expr: expr.to_string(), report, claims });
    }

    // fg = 0 only on the boundary, T_f T_g not compact.
    {
        let g = phi_z.add(&psi_w);
        let expr = OperatorExpr::product(vec![phi_w.clone(), g])?;
        let mut claims = Vec::new();
        let zero = Rat::zero();
        let at_origin = phi.eval_exact(&zero) * (phi.eval_exact(&zero) + psi.eval_exact(&zero));
        claims.push(claim("f(0,0) g(0,0) = 1", at_origin.is_one(), format!("exact value {}", crate::rational::format_rat(&at_origin))));
        claims.push(bound_claim(&expr, config.seed)?);
        let report = run(&expr, config, &mut claims)?;
        if let Some(r) = &report {
            let worst = r.face_maxima.iter().map(|f| f.max).fold(0.0, f64::max);
            claims.push(claim("fg vanishes on both faces", worst < 1e-12, format!("sampled face max {worst:e}")));
        }
        slice_claims(&report, &mut claims);
        examples.push(ExampleResult { name: "fg vanishes on the boundary only".into(), expr: expr.to_string(), report, claims });
    }

    // The compact catalog case.
    {
        let expr = OperatorExpr::toeplitz(bidisc_defining());
        let mut claims = Vec::new();
        let report = run(&expr, config, &mut claims)?;
        if let Some(r) = &report {
            claims.push(claim(
                "every slice is exactly zero",
                r.slices.iter().all(|s| s.exact_zero && s.norm == 0.0),
                format!("{} samples", r.slices.len()),
            ));
            let tails: Vec<f64> = r.profiles.iter().filter_map(|p| p.tail()).collect();
            let worst = tails.iter().cloned().fold(0.0, f64::max);
            claims.push(claim(
                "no decay obstruction",
                r.profiles.iter().all(|p| !super::decay::is_obstruction(p, config.tol_decay)),
                format!("largest reliable tail {worst:e} over {} profiles", tails.len()),
            ));
            claims.push(claim("verdict is compact-consistent", r.verdict == Verdict::CompactConsistent, format!("verdict {:?}", r.verdict)));
        }
        examples.push(ExampleResult { name: "compact catalog case".into(), expr: expr.to_string(), report, claims });
    }

    Ok(ExampleBundle { config: config.clone(), examples, warnings })
}

/// Builds the bundle for the standard `phi` and fails on the first false claim.
pub fn reproduce_examples(config: &DiagnosticsConfig) -> Result<ExampleBundle> {
    let bundle = build_examples(config, &crate::catalog::phi_profile())?;
    bundle.check()?;
    Ok(bundle)
}
