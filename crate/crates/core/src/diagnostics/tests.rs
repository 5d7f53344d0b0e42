use super::*;
use crate::basis::{CoefVector, MultiIndex, Truncation};
use crate::catalog::{bidisc_defining, phi, phi_profile_with_break, psi};
use crate::error::Error;
use crate::grammar::{parse_operator, parse_symbol};
use crate::opexpr::OperatorExpr;
use crate::quadops::gauss_legendre;
use crate::rational::{crat_one, rat};
use crate::symbols::{PolyZZbar, SymbolExpr};
use crate::toeplitz::AssemblyMode;
use num_complex::Complex64;

const LOWER: f64 = 17.0 / 576.0;

fn example_one() -> OperatorExpr {
    OperatorExpr::product(vec![phi(2, 2), psi(2, 2)]).unwrap()
}

fn example_two() -> OperatorExpr {
    OperatorExpr::product(vec![phi(2, 2), phi(2, 1).add(&psi(2, 2))]).unwrap()
}

fn slices(expr: &OperatorExpr, cap: usize, count: usize) -> Vec<SliceVerdict> {
    let trunc = Truncation::uniform(expr.dim(), cap).unwrap();
    restriction_slice_test(expr, count, &trunc, crate::toeplitz::default_pad(expr), AssemblyMode::Exact).unwrap()
}

fn poly(text: &str, n: usize) -> PolyZZbar {
    PolyZZbar::from_symbol(&parse_symbol(text, n).unwrap()).unwrap()
}

#[test]
fn defining_function_slices_vanish_exactly() {
    let s = slices(&OperatorExpr::toeplitz(bidisc_defining()), 16, 8);
    assert_eq!(s.len(), 16);
    assert!(s.iter().all(|v| v.exact_zero && v.norm == 0.0));
}

#[test]
fn first_example_slices() {
    let s = slices(&example_one(), 32, 16);
    for v in &s {
        if v.k == 2 {
            assert!(v.exact_zero, "k = 2 slice {v:?}");
        } else {
            assert!(!v.exact_zero && v.certified && v.norm >= LOWER, "k = 1 slice {v:?}");
        }
    }
}

#[test]
fn second_example_slices_bounded_below() {
    for cap in [8, 16, 32] {
        let s = slices(&example_two(), cap, 8);
        let k1 = s.iter().filter(|v| v.k == 1);
        assert!(k1.clone().all(|v| v.certified && v.norm >= LOWER), "cap {cap}");
        // The k = 1 slice is T_phi T_psi for every xi, since phi vanishes on the circle.
        let norms: Vec<f64> = k1.map(|v| v.norm).collect();
        assert!(norms.iter().all(|x| (x - norms[0]).abs() < 1e-12));
    }
}

#[test]
fn nonzero_evidence_survives_doubling() {
    let tol = 1e-8;
    for expr in [example_one(), example_two(), parse_operator("T(z1)*T(conj(z2))", 2).unwrap()] {
        let coarse = slices(&expr, 8, 8);
        let fine = slices(&expr, 16, 8);
        for (a, b) in coarse.iter().zip(&fine) {
            if a.certified && a.norm > tol {
                assert!(b.norm > tol && b.norm >= a.norm - 1e-12, "{expr}: {a:?} then {b:?}");
            }
        }
    }
}

#[test]
fn exact_zero_agrees_with_quadrature() {
    // Both are exactly zero operators, one only after cancellation.
    let exprs = [
        OperatorExpr::toeplitz(bidisc_defining()),
        parse_operator("T(z2)*T(z3) - T(z2*z3)", 3).unwrap(),
        parse_operator("T(z1*conj(z2)) - T(z1)*T(conj(z2))", 2).unwrap(),
    ];
    for expr in exprs {
        let n = expr.dim();
        let trunc = Truncation::uniform(n, 6).unwrap();
        let pad = crate::toeplitz::default_pad(&expr);
        let exact = restriction_slice_test(&expr, 8, &trunc, pad, AssemblyMode::Exact).unwrap();
        assert!(exact.iter().all(|v| v.exact_zero), "{expr}");
        let coeffs = slice_coefficients(&expr, 1, &trunc, pad).unwrap();
        let mut op = crate::toeplitz::TensorOperator::zero(trunc.without(0).unwrap());
        for (_, o) in coeffs {
            op = op.add(&o.to_float()).unwrap();
        }
        assert!(op.operator_norm(1e-12, 1).unwrap() <= 1e-13, "{expr}");
    }
}

#[test]
fn cancellation_needs_the_entrywise_check() {
    let expr = parse_operator("T(z2)*T(z3) - T(z2*z3) + T(z1)", 3).unwrap();
    let trunc = Truncation::uniform(3, 5).unwrap();
    let coeffs = slice_coefficients(&expr, 1, &trunc, 2).unwrap();
    // The xi^0 coefficient cancels; xi^1 carries the identity on the remaining variables.
    assert!(coeffs.get(&0).is_none_or(|op| op.is_exactly_zero(1 << 20) == Some(true)));
    assert!(coeffs.get(&1).is_some_and(|op| op.is_exactly_zero(1 << 20) == Some(false)));
}

#[test]
fn quadrature_slices_match_exact() {
    let expr = example_two();
    let trunc = Truncation::uniform(2, 12).unwrap();
    let a = restriction_slice_test(&expr, 6, &trunc, 0, AssemblyMode::Exact).unwrap();
    let b = restriction_slice_test(&expr, 6, &trunc, 0, AssemblyMode::Quadrature { q_r: 24 }).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.norm - y.norm).abs() < 1e-10, "{x:?} {y:?}");
    }
}

#[test]
fn slices_refuse_discontinuous_symbols() {
    let bad = SymbolExpr::radial(2, 2, phi_profile_with_break(rat(1, 3))).unwrap();
    let expr = OperatorExpr::toeplitz(bad);
    let trunc = Truncation::uniform(2, 4).unwrap();
    match restriction_slice_test(&expr, 4, &trunc, 0, AssemblyMode::Exact) {
        Err(Error::Refusal(msg)) => assert!(msg.contains("continuous"), "{msg}"),
        other => panic!("expected refusal, got {other:?}"),
    }
    let one_var = OperatorExpr::toeplitz(phi(1, 1));
    assert!(restriction_slice_test(&one_var, 4, &Truncation::uniform(1, 4).unwrap(), 0, AssemblyMode::Exact).is_err());
}

#[test]
fn sampling_certifies_polynomial_slices() {
    // Slice entries are trigonometric polynomials in xi of degree at most d;
    // more than 2d samples all vanishing means the slice vanishes for every xi.
    let expr = parse_operator("T(z1*conj(z2)) - T(z1)*T(conj(z2))", 2).unwrap();
    let trunc = Truncation::uniform(2, 6).unwrap();
    let d = slice_coefficients(&expr, 1, &trunc, 2).unwrap().keys().map(|d| d.unsigned_abs()).max().unwrap_or(0);
    let s = restriction_slice_test(&expr, 2 * d as usize + 1, &trunc, 2, AssemblyMode::Exact).unwrap();
    assert!(s.iter().all(|v| v.norm <= 1e-13));
}

#[test]
fn exact_slice_at_rational_point() {
    let expr = parse_operator("T(z1 + z2)", 2).unwrap();
    let trunc = Truncation::uniform(2, 4).unwrap();
    let xi = crate::rational::crat(rat(3, 5), rat(4, 5));
    let op = slice_at_exact(&expr, 1, &xi, &trunc, 1).unwrap().to_float().to_matrix();
    // xi I + T_z on one variable.
    let m = op.entries;
    assert!((m[[0, 0]] - Complex64::new(0.6, 0.8)).norm() < 1e-15);
    assert!((m[[1, 0]] - Complex64::new(2f64.sqrt() / 2.0, 0.0)).norm() < 1e-15);
    assert!(slice_at_exact(&expr, 1, &crate::rational::crat(rat(1, 2), rat(0, 1)), &trunc, 1).is_err());
}

#[test]
fn default_targets_shape() {
    let t = default_targets(2);
    assert_eq!(t.len(), 8);
    assert!(t.iter().all(|q| q.iter().any(|c| (c.norm() - 1.0).abs() < 1e-15)));
    assert_eq!(default_targets(1).len(), 3);
}

fn decay_of(expr: &OperatorExpr, targets: &[Vec<Complex64>], cap: usize) -> DecayOutcome {
    let trunc = Truncation::uniform(expr.dim(), cap).unwrap();
    let ts = crate::berezin::ApproachSchedule::DEFAULT_TS;
    decay_test(expr, targets, &ts, &trunc, crate::toeplitz::default_pad(expr), 1e-6, AssemblyMode::Exact).unwrap()
}

#[test]
fn defining_function_shows_no_obstruction() {
    let out = decay_of(&OperatorExpr::toeplitz(bidisc_defining()), &default_targets(2), 64);
    assert_eq!(out.verdict, DecayVerdict::NoObstruction);
    assert_eq!(out.profiles.len(), 8);
}

#[test]
fn first_example_does_not_decay_towards_a_face() {
    let c = |re: f64| Complex64::new(re, 0.0);
    let out = decay_of(&example_one(), &[vec![c(1.0), c(0.0)]], 64);
    assert_eq!(out.verdict, DecayVerdict::NotCompact);
    // B T(p_1, 0) = lambda_0 mu_0 for every p_1.
    let tail = out.profiles[0].tail().unwrap();
    assert!((tail - 5.0 / 144.0).abs() < 1e-12 && tail > LOWER);
}

#[test]
fn holomorphic_multiplier_does_not_decay() {
    let c = |re: f64| Complex64::new(re, 0.0);
    let out = decay_of(&parse_operator("T(z1)", 2).unwrap(), &[vec![c(1.0), c(1.0)]], 64);
    assert_eq!(out.verdict, DecayVerdict::NotCompact);
    for s in out.profiles[0].reliable() {
        assert!((s.abs_bt - s.p[0].norm()).abs() < 1e-9, "{s:?}");
    }
}

#[test]
fn harmonic_criterion_examples() {
    let out = harmonic_slice_criterion(&poly("z1", 2), &poly("conj(z2)", 2)).unwrap();
    assert_eq!(out.verdict, CriterionVerdict::NotCompact);
    let out = harmonic_slice_criterion(&PolyZZbar::zero(2), &poly("z1 + conj(z2)", 2)).unwrap();
    assert_eq!(out.verdict, CriterionVerdict::Compact);
    let out = harmonic_slice_criterion(&poly("z1", 2), &poly("z2", 2)).unwrap();
    assert_eq!(out.verdict, CriterionVerdict::NotCompact);
    // Cross-check: B(T_z1 T_z2) = p1 p2 does not decay towards (1, 1).
    let c = |re: f64| Complex64::new(re, 0.0);
    let d = decay_of(&parse_operator("T(z1)*T(z2)", 2).unwrap(), &[vec![c(1.0), c(1.0)]], 64);
    assert_eq!(d.verdict, DecayVerdict::NotCompact);
}

#[test]
fn harmonic_criterion_names_the_laplacian() {
    match harmonic_slice_criterion(&poly("z1", 2), &poly("z2*conj(z2)", 2)) {
        Err(Error::Refusal(msg)) => assert!(msg.contains("Laplacian in z2 of g"), "{msg}"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(harmonic_slice_criterion(&poly("z1", 1), &poly("z1", 1)), Err(Error::Refusal(_))));
}

#[test]
fn harmonic_criterion_agrees_with_slices() {
    let corpus = [("z1", "conj(z2)"), ("z1*z2", "conj(z1)"), ("0", "z1"), ("z1 - z2", "z1 + z2"), ("1", "z1*conj(z2)")];
    for (f, g) in corpus {
        let verdict = harmonic_slice_criterion(&poly(f, 2), &poly(g, 2)).unwrap().verdict;
        let expr = parse_operator(&format!("T({f})*T({g})"), 2).unwrap();
        let zero = slices(&expr, 8, 8).iter().all(|v| v.norm <= 1e-8);
        assert_eq!(verdict == CriterionVerdict::Compact, zero, "{f}, {g}");
    }
}

#[test]
fn decoupled_criterion_examples() {
    // F = phi(z) psi(w) equals phi(z) on the face |w| = 1, so this pair is not compact.
    let out = decoupled_criterion(&[phi(2, 1), psi(2, 2)], 7).unwrap();
    assert_eq!(out.verdict, CriterionVerdict::NotCompactUnlessZero);
    let expr = OperatorExpr::product(vec![phi(2, 1), psi(2, 2)]).unwrap();
    let s = slices(&expr, 16, 4);
    assert!(s.iter().filter(|v| v.k == 2).all(|v| v.certified && (v.norm - 1.0 / 12.0).abs() < 1e-12));
    // ... that slice is T_phi, of norm lambda_0 = 1/12.

    // F = phi(z) phi(w) vanishes on the boundary and F(0, 0) = 1.
    let out = decoupled_criterion(&[phi(2, 1), phi(2, 2)], 7).unwrap();
    assert_eq!(out.verdict, CriterionVerdict::Compact, "{:?}", out.evidence);
    let expr = OperatorExpr::product(vec![phi(2, 1), phi(2, 2)]).unwrap();
    assert!(slices(&expr, 16, 4).iter().all(|v| v.exact_zero));

    let out = decoupled_criterion(&[phi(2, 2), psi(2, 2)], 7).unwrap();
    assert_eq!(out.verdict, CriterionVerdict::Inconclusive);

    let out = decoupled_criterion(&[SymbolExpr::coord(2, 1).unwrap(), SymbolExpr::coord(2, 2).unwrap()], 7).unwrap();
    assert_eq!(out.verdict, CriterionVerdict::NotCompactUnlessZero);

    let mixed = parse_symbol("z1 + z2", 2).unwrap();
    assert!(matches!(decoupled_criterion(&[mixed], 7), Err(Error::NotTensor(1))));
}

#[test]
fn decoupled_criterion_is_deterministic() {
    let a = decoupled_criterion(&[phi(3, 1), phi(3, 2), phi(3, 3)], 11).unwrap();
    let b = decoupled_criterion(&[phi(3, 1), phi(3, 2), phi(3, 3)], 11).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.verdict, CriterionVerdict::Compact);
}

#[test]
fn polynomial_criterion_examples() {
    let one = SymbolExpr::one(2);
    let out = polynomial_criterion(&[poly("1 - z1*conj(z1)", 2)], &one, &[poly("1 - z2*conj(z2)", 2)]).unwrap();
    assert_eq!(out.verdict, CriterionVerdict::Compact);
    let out = polynomial_criterion(&[poly("z1", 2)], &one, &[poly("z2", 2)]).unwrap();
    assert_eq!(out.verdict, CriterionVerdict::NotCompact);
    // T_h for the pointwise product of the second example is compact, though T_f T_g is not.
    let h = pointwise_symbol(&example_two());
    let out = polynomial_criterion(&[], &h, &[]).unwrap();
    assert_eq!(out.verdict, CriterionVerdict::Compact);
    assert!(matches!(polynomial_criterion(&[], &SymbolExpr::one(3), &[]), Err(Error::Refusal(_))));
}

#[test]
fn polynomial_criterion_agrees_with_slices() {
    let corpus: [(&[&str], &str, &[&str]); 5] = [
        (&["1 - z1*conj(z1)"], "1", &["1 - z2*conj(z2)"]),
        (&["z1"], "1", &["z2"]),
        (&["1 - z1*conj(z1)"], "1", &["z2"]),
        (&["(1 - z1*conj(z1))*(1 - z2*conj(z2))"], "z1 + conj(z2)", &[]),
        (&[], "z1*z2", &["conj(z1)"]),
    ];
    for (fs, h, gs) in corpus {
        let fs: Vec<PolyZZbar> = fs.iter().map(|t| poly(t, 2)).collect();
        let gs: Vec<PolyZZbar> = gs.iter().map(|t| poly(t, 2)).collect();
        let h = parse_symbol(h, 2).unwrap();
        let verdict = polynomial_criterion(&fs, &h, &gs).unwrap().verdict;
        let expr = polynomial_operator(&fs, &h, &gs).unwrap();
        let zero = slices(&expr, 8, 8).iter().all(|v| v.norm <= 1e-8);
        assert_eq!(verdict == CriterionVerdict::Compact, zero, "{expr}");
    }
}

/// `int_D u(z) |k_t(z)|^2 dnu` on a polar tensor grid, `k_t` the normalized kernel.
fn kernel_weighted_integral(u: impl Fn(Complex64) -> f64, t: f64) -> f64 {
    let gl = gauss_legendre(40).unwrap();
    let panels = 16;
    let angles = 512;
    let mut sum = 0.0;
    for p in 0..panels {
        let (lo, hi) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
        sum += gl.integrate(lo, hi, |r| {
            (0..angles)
                .map(|a| {
                    let z = Complex64::from_polar(r, std::f64::consts::TAU * a as f64 / angles as f64);
                    let k = (1.0 - t * t) / (Complex64::new(1.0, 0.0) - z * t).powi(2);
                    u(z) * k.norm_sqr() * 2.0 * r / angles as f64
                })
                .sum::<f64>()
        });
    }
    sum
}

/// The polar grid resolves the kernel up to t = 0.95; beyond that the graded
/// Berezin quadrature serves as the reference.
fn oracle(u: impl Fn(Complex64) -> f64, text: &str, t: f64) -> f64 {
    if t <= 0.95 {
        kernel_weighted_integral(u, t).sqrt()
    } else {
        let f = parse_symbol(text, 1).unwrap();
        crate::berezin::berezin_symbol(&f, &crate::basis::Point::real(&[t]), 32).unwrap().re.sqrt()
    }
}

fn e0(n: usize, cap: usize) -> CoefVector {
    CoefVector::basis(Truncation::uniform(n, cap).unwrap(), &MultiIndex(vec![0; n])).unwrap()
}

#[test]
fn lemma_probe_vanishes_for_frozen_symbols() {
    let psi_w = parse_symbol("z2 + conj(z2)*z2", 2).unwrap();
    let out = lemma_limit_probe(&psi_w, &crat_one(), &e0(1, 4), &[0.0, 0.5, 0.9]).unwrap();
    assert!(out.iter().all(|(_, v)| *v == 0.0));
}

#[test]
fn lemma_probe_modulus_squared() {
    let psi = parse_symbol("z1*conj(z1)", 2).unwrap();
    let ts = [0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99];
    let out = lemma_limit_probe(&psi, &crat_one(), &e0(1, 4), &ts).unwrap();
    assert!((out[0].1 - 1.0 / 3f64.sqrt()).abs() < 1e-14);
    for &(t, v) in &out {
        let oracle = oracle(|z| (z.norm_sqr() - 1.0).powi(2), "(1 - z1*conj(z1))^2", t);
        assert!((v - oracle).abs() < 1e-9, "t = {t}: {v} vs {oracle}");
    }
    assert!(out.windows(2).all(|w| w[1].1 < w[0].1));
    assert!(out.last().unwrap().1 < 0.05);
    let far = lemma_limit_probe(&psi, &crat_one(), &e0(1, 4), &[0.999]).unwrap();
    assert!(far[0].1 < 0.05 * out[0].1);
}

#[test]
fn lemma_probe_coordinate() {
    let psi = parse_symbol("z1", 2).unwrap();
    let ts = [0.0, 0.5, 0.9, 0.99, 0.999];
    let out = lemma_limit_probe(&psi, &crat_one(), &e0(1, 3), &ts).unwrap();
    for &(t, v) in &out[..4] {
        let oracle = oracle(|z| (z - 1.0).norm_sqr(), "(z1 - 1)*(conj(z1) - 1)", t);
        assert!((v - oracle).abs() < 1e-9, "t = {t}: {v} vs {oracle}");
    }
    assert!(out.windows(2).all(|w| w[1].1 < w[0].1));
    assert!(out.last().unwrap().1 < 0.05 * out[0].1);
}

#[test]
fn lemma_probe_with_mixed_symbol() {
    // psi = |z1|^2 (1 + z2): the z2 part only rescales by ||(1 + z2) h||.
    let psi = parse_symbol("z1*conj(z1)*(1 + z2)", 2).unwrap();
    let h = e0(1, 4);
    let out = lemma_limit_probe(&psi, &crat_one(), &h, &[0.0, 0.5]).unwrap();
    let base = lemma_limit_probe(&parse_symbol("z1*conj(z1)", 2).unwrap(), &crat_one(), &h, &[0.0, 0.5]).unwrap();
    // ||(1 + w) e_0||^2 = 1 + 1/2.
    for (a, b) in out.iter().zip(&base) {
        assert!((a.1 - b.1 * 1.5f64.sqrt()).abs() < 1e-14);
    }
    assert!(lemma_limit_probe(&psi, &crate::rational::crat(rat(1, 2), rat(0, 1)), &h, &[0.5]).is_err());
}

fn quick_config() -> DiagnosticsConfig {
    DiagnosticsConfig { caps: vec![32], xi_count: 16, ..DiagnosticsConfig::default() }
}

#[test]
fn analyze_verdicts() {
    let cfg = quick_config();
    assert_eq!(analyze(&example_one(), &cfg).unwrap().verdict, Verdict::NotCompact);
    assert_eq!(analyze(&example_two(), &cfg).unwrap().verdict, Verdict::NotCompact);
    let r = analyze(&OperatorExpr::toeplitz(bidisc_defining()), &cfg).unwrap();
    assert_eq!(r.verdict, Verdict::CompactConsistent, "{:?}", r.evidence);
    let r = analyze(&parse_operator("T(z1)", 1).unwrap(), &cfg).unwrap();
    assert_eq!(r.verdict, Verdict::NotCompact);
    assert!(r.slices.is_empty());
    let r = analyze(&parse_operator("T(1 - z1*conj(z1))", 1).unwrap(), &cfg).unwrap();
    assert_eq!(r.verdict, Verdict::CompactConsistent);
}

#[test]
fn report_json_schema() {
    let r = analyze(&example_one(), &quick_config()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for key in ["expr", "trunc", "pad", "tol", "slices", "profiles", "face_maxima", "verdict", "evidence"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["verdict"], "not-compact");
    let s = &v["slices"][0];
    for key in ["k", "xi_re", "xi_im", "norm", "exact_zero"] {
        assert!(s.get(key).is_some(), "slice missing {key}");
    }
}

#[test]
fn examples_reproduce() {
    let bundle = reproduce_examples(&DiagnosticsConfig::default()).unwrap();
    assert_eq!(bundle.examples.len(), 3);
    assert!(bundle.warnings.is_empty());
    assert!(bundle.examples.iter().all(|e| e.claims.iter().all(|c| c.passed)));
}

#[test]
fn corrupted_phi_fails_loudly() {
    let bundle = build_examples(&quick_config(), &phi_profile_with_break(rat(1, 3))).unwrap();
    assert!(!bundle.warnings.is_empty());
    match bundle.check() {
        Err(Error::ClaimFailed(msg)) => assert!(!msg.is_empty()),
        other => panic!("{other:?}"),
    }
}
