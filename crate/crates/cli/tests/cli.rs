use bergman_cli::{cmd_berezin, cmd_compactness, cmd_divide, cmd_examples, cmd_spectrum, Command, Opts, RunConfig};
use bergman_core::{parse_symbol, SymbolExpr};
use std::process::Command as Process;

const PHI: &str = "radial(z1; [0,1/2]: 1-2r, [1/2,1]: 0)";
const PSI: &str = "radial(z1; [0,1/2]: 0, [1/2,1]: 2r-1)";

fn config(command: Command, n: usize, caps: usize) -> RunConfig {
    let opts = Opts { n: Some(n), caps: vec![caps], xi_count: 16, ..Opts::default() };
    RunConfig::new(&opts, &command)
}

fn spectrum_cfg(caps: usize) -> RunConfig {
    config(Command::Spectrum { symbol: String::new() }, 1, caps)
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn spectrum_of_phi_matches_closed_form() {
    let out = cmd_spectrum(&spectrum_cfg(20), PHI).unwrap();
    assert!(out.starts_with("# run_config: "));
    let rows = rows(&out);
    assert_eq!(rows.len(), 20);
    for (m, r) in rows.iter().enumerate() {
        // lambda_m = 1 / (4^{m+1} (2m + 3))
        let den = 4u128.pow(m as u32 + 1) * (2 * m as u128 + 3);
        assert_eq!(r[1], "1");
        assert_eq!(r[2], den.to_string());
    }
}

#[test]
fn spectrum_of_psi_and_constants() {
    let rows_psi = rows(&cmd_spectrum(&spectrum_cfg(4), PSI).unwrap());
    // mu_0 = int_{1/2}^1 (2r - 1) 2r dr = 5/12
    assert_eq!((rows_psi[0][1].as_str(), rows_psi[0][2].as_str()), ("5", "12"));
    let ones = rows(&cmd_spectrum(&spectrum_cfg(6), "1").unwrap());
    assert!(ones.iter().all(|r| r[1] == "1" && r[2] == "1" && r[3] == "1"));
    assert!(cmd_spectrum(&spectrum_cfg(4), "z1").is_err());
    assert!(cmd_spectrum(&spectrum_cfg(4), "z1 + conj(z1)").is_err());
}

#[test]
fn divide_examples() {
    let cfg = config(Command::Divide { symbol: String::new() }, 1, 8);
    let parse = |s: &str| -> serde_json::Value { serde_json::from_str(&cmd_divide(&cfg, s).unwrap()).unwrap() };
    let v = parse("1 - z1*conj(z1)");
    assert_eq!(v["divisible"], true);
    assert_eq!(v["quotient"], "1");
    let v = parse("z1 - z1^2*conj(z1)");
    assert_eq!(v["quotient"], "z1");
    let v = parse("z1");
    assert_eq!(v["divisible"], false);
    assert!(v.get("quotient").is_none());
    assert_eq!(v["run_config"]["command"], "divide");
    assert!(cmd_divide(&cfg, PHI).is_err());
}

#[test]
fn divide_quotient_reparses() {
    let cfg = config(Command::Divide { symbol: String::new() }, 1, 8);
    let text = "(1 - z1*conj(z1))*(3/2*z1^2 - conj(z1) + (1 + 2*i))";
    let v: serde_json::Value = serde_json::from_str(&cmd_divide(&cfg, text).unwrap()).unwrap();
    let q = parse_symbol(v["quotient"].as_str().unwrap(), 1).unwrap();
    assert_eq!(q, parse_symbol("3/2*z1^2 - conj(z1) + (1 + 2*i)", 1).unwrap());
}

fn berezin_values(cfg: &RunConfig, text: &str, radii: &[f64], angles: usize) -> Vec<Vec<f64>> {
    rows(&cmd_berezin(cfg, text, radii, angles).unwrap())
        .into_iter()
        .map(|r| r.iter().map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn berezin_examples() {
    let cfg = config(Command::Berezin { text: String::new(), radii: vec![], angles: 0 }, 1, 64);
    for r in berezin_values(&cfg, "1", &[0.0, 0.5, 0.9], 3) {
        assert_eq!(r[2], 1.0);
    }
    for r in berezin_values(&cfg, "z1", &[0.0, 0.3, 0.6, 0.9], 5) {
        assert!((r[2] - r[0]).abs() < 1e-8 && (r[3] - r[1]).abs() < 1e-8, "{r:?}");
    }
    let op = format!("T({PHI})*T({PSI})");
    let at0 = &berezin_values(&cfg, &op, &[0.0], 1)[0];
    // <T_phi T_psi e_0, e_0> = lambda_0 mu_0 = (1/12)(5/12)
    assert!((at0[2] - 5.0 / 144.0).abs() < 1e-15);
    assert_eq!(at0[4], 0.0);
    let cfg2 = config(Command::Berezin { text: String::new(), radii: vec![], angles: 0 }, 2, 8);
    let vals = berezin_values(&cfg2, "T(z1)*T(z2)", &[0.0, 0.5], 2);
    assert_eq!(vals.len(), 9);
    for r in vals {
        let (p1, p2) = (r[0], r[2]);
        assert!((r[4] - p1 * p2).abs() < 1e-3, "{r:?}");
        assert!(r[6] >= 0.0);
    }
    assert!(cmd_berezin(&cfg, "z1", &[1.0], 1).is_err());
}

fn compactness(text: &str, caps: usize) -> serde_json::Value {
    let cfg = config(Command::Compactness { expr: String::new() }, 2, caps);
    serde_json::from_str(&cmd_compactness(&cfg, text).unwrap()).unwrap()
}

#[test]
fn compactness_examples() {
    let phi_w = "radial(z2; [0,1/2]: 1-2r, [1/2,1]: 0)";
    let phi_z = "radial(z1; [0,1/2]: 1-2r, [1/2,1]: 0)";
    let psi_w = "radial(z2; [0,1/2]: 0, [1/2,1]: 2r-1)";
    let v = compactness(&format!("T({phi_w}) * T({phi_z} + {psi_w})"), 32);
    assert_eq!(v["verdict"], "not-compact");
    assert!(v["evidence"][0].as_str().unwrap().contains("k = 1"));
    assert_eq!(v["run_config"]["caps"][0], 32);

    let v = compactness("T((1-z1*conj(z1))*(1-z2*conj(z2)))", 32);
    assert_eq!(v["verdict"], "compact-consistent");
    assert!(v["slices"].as_array().unwrap().iter().all(|s| s["exact_zero"] == true));

    let v = compactness("T(z1)*T(z2)", 32);
    assert_eq!(v["verdict"], "not-compact");
    let ev: Vec<&str> = v["evidence"].as_array().unwrap().iter().map(|e| e.as_str().unwrap()).collect();
    assert!(ev.iter().any(|e| e.contains("does not decay towards [(1.0, 0.0), (1.0, 0.0)]")), "{ev:?}");
}

#[test]
fn examples_pass_at_smaller_caps() {
    let cfg = config(Command::Examples { phi_break: None }, 2, 16);
    let (json, check) = cmd_examples(&cfg, None).unwrap();
    check.unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["examples"].as_array().unwrap().len(), 3);
}

#[test]
fn parser_round_trip_corpus() {
    let corpus = [
        ("1 - z1*conj(z1)", 1),
        ("z1^2*conj(z2) + 3", 2),
        ("radial(z2; [0,1/2]: 1-2r, [1/2,1]: 0)", 2),
        ("(1/2 - i)*z1*conj(z1)^2 - 7/3", 1),
        ("radial(z1; [0,1/3]: 1 - 3r, [1/3,1]: 0)*z2 + conj(z1)*(z2 - 1)", 2),
        ("(z1 + z2)^3", 2),
        ("-(z1 - conj(z1))*(1 - z3*conj(z3))", 3),
    ];
    for (text, n) in corpus {
        let s: SymbolExpr = parse_symbol(text, n).unwrap();
        let again = parse_symbol(&s.to_string(), n).unwrap();
        assert_eq!(s, again, "{text} printed as {s}");
    }
}

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_bergman"))
}

#[test]
fn exit_code_contract() {
    let ok = bin().args(["divide", "z1", "--n", "1"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("\"divisible\": false"));

    let refused = bin()
        .args(["compactness", "T(radial(z2; [0,1/3]: 1, [1/3,1]: 0))", "--caps", "4"])
        .output()
        .unwrap();
    assert_eq!(refused.status.code(), Some(2));
    assert!(refused.stdout.is_empty());
    assert!(String::from_utf8_lossy(&refused.stderr).contains("refused"));

    let bad = bin().args(["spectrum", "z1 +", "--caps", "4"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("parse error at byte"));
}

#[test]
fn corrupted_phi_propagates_warning_and_fails() {
    let dir = std::env::temp_dir().join(format!("bergman-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("bundle.json");
    let run = bin()
        .args(["examples", "--phi-break", "0.6", "--caps", "8", "--xi-count", "8", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_ne!(run.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let w = v["warnings"][0].as_str().unwrap();
    assert!(w.contains("discontinuous") && w.contains("0.6"), "{w}");
    assert!(String::from_utf8_lossy(&run.stderr).contains("claim failed"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_output_is_deterministic() {
    let cfg = config(Command::Berezin { text: String::new(), radii: vec![], angles: 0 }, 2, 8);
    let a = cmd_berezin(&cfg, "T(z1*conj(z2) + 1/3)", &[0.0, 0.7], 3).unwrap();
    let b = cmd_berezin(&cfg, "T(z1*conj(z2) + 1/3)", &[0.0, 0.7], 3).unwrap();
    assert_eq!(a, b);
}
