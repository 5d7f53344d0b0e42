//! Command implementations for the `bergman` binary. Every command returns its
//! full output as a string so tests can compare bytes without spawning processes.

use bergman_core::berezin::{berezin_symbol, berezin_symbol_series, berezin_tensor, ApproachSchedule};
use bergman_core::basis::kernel_mass_defect;
use bergman_core::catalog::phi_profile;
use bergman_core::diagnostics::{analyze, build_examples, DiagnosticsConfig};
use bergman_core::rational::{parse_rat, rat_parts, rat_to_f64};
use bergman_core::toeplitz::{compose, AssemblyMode, ScaledBandMatrix};
use bergman_core::{catalog, parse_operator, parse_symbol, Complex64, Error, Point, PolyZZbar, Result, SymbolExpr};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::fmt::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_REFUSAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bergman", about = "Toeplitz operators on the Bergman space of the polydisc")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Opts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Opts {
    /// Number of variables (default: 1 for spectrum and divide, 2 otherwise).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Truncation caps, one per variable or one for all.
    #[arg(long, global = true, value_delimiter = ',', default_value = "64")]
    pub caps: Vec<usize>,
    /// Padding for products (default: summed degree shifts).
    #[arg(long, global = true)]
    pub pad: Option<usize>,
    #[arg(long = "xi-count", global = true, default_value_t = 64)]
    pub xi_count: usize,
    /// Gauss-Legendre order per radial panel for the floating path.
    #[arg(long, global = true, default_value_t = 64)]
    pub qr: usize,
    #[arg(long = "tol-slice", global = true, default_value_t = 1e-8)]
    pub tol_slice: f64,
    #[arg(long = "tol-decay", global = true, default_value_t = 1e-6)]
    pub tol_decay: f64,
    /// Approach parameters t in [0, 1) for decay profiles.
    #[arg(long, global = true, value_delimiter = ',')]
    pub schedule: Option<Vec<f64>>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Exact rational assembly (default).
    #[arg(long, global = true, conflicts_with = "float")]
    pub exact: bool,
    /// Quadrature assembly.
    #[arg(long, global = true)]
    pub float: bool,
}

impl Default for Opts {
    fn default() -> Self {
        Opts {
            n: None,
            caps: vec![64],
            pad: None,
            xi_count: 64,
            qr: 64,
            tol_slice: 1e-8,
            tol_decay: 1e-6,
            schedule: None,
            out: None,
            seed: 0x5eed,
            exact: false,
            float: false,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Exact eigenvalues of a radial one-variable Toeplitz operator.
    Spectrum { symbol: String },
    /// Berezin transform of a symbol or an operator expression on a polar grid.
    Berezin {
        /// A symbol, or an operator expression using T(...).
        text: String,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,0.9")]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 4)]
        angles: usize,
    },
    /// Full compactness diagnostics for an operator expression.
    Compactness { expr: String },
    /// Divisibility of a one-variable polynomial by 1 - |z|^2.
    Divide { symbol: String },
    /// Reproduces the worked examples and checks their claims.
    Examples {
        /// Replace the breakpoint 1/2 of phi (any other value breaks continuity).
        #[arg(long = "phi-break")]
        phi_break: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Berezin { .. } => "berezin",
            Command::Compactness { .. } => "compactness",
            Command::Divide { .. } => "divide",
            Command::Examples { .. } => "examples",
        }
    }

    fn default_n(&self) -> usize {
        match self {
            Command::Spectrum { .. } | Command::Divide { .. } => 1,
            _ => 2,
        }
    }
}

/// Everything that determines a run, echoed into each output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub n: usize,
    pub caps: Vec<usize>,
    pub pad: Option<usize>,
    pub xi_count: usize,
    pub qr: usize,
    pub tol_slice: f64,
    pub tol_decay: f64,
    pub schedule: Vec<f64>,
    pub seed: u64,
    pub mode: AssemblyMode,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(opts: &Opts, command: &Command) -> Self {
        RunConfig {
            command: command.name().into(),
            n: opts.n.unwrap_or_else(|| command.default_n()),
            caps: opts.caps.clone(),
            pad: opts.pad,
            xi_count: opts.xi_count,
            qr: opts.qr,
            tol_slice: opts.tol_slice,
            tol_decay: opts.tol_decay,
            schedule: opts.schedule.clone().unwrap_or_else(|| ApproachSchedule::DEFAULT_TS.to_vec()),
            seed: opts.seed,
            mode: if opts.float { AssemblyMode::Quadrature { q_r: opts.qr } } else { AssemblyMode::Exact },
            out: opts.out.clone(),
        }
    }

    pub fn diagnostics(&self) -> DiagnosticsConfig {
        DiagnosticsConfig {
            caps: self.caps.clone(),
            pad: self.pad,
            xi_count: self.xi_count,
            tol_slice: self.tol_slice,
            tol_decay: self.tol_decay,
            ts: self.schedule.clone(),
            seed: self.seed,
            mode: self.mode,
        }
    }

    fn json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// First line of every CSV output.
    fn csv_comment(&self) -> String {
        format!("# run_config: {}\n", serde_json::to_string(self).expect("config serializes"))
    }
}

/// Text for the output sink plus the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub diagnostics: Vec<String>,
    pub exit: i32,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, diagnostics: Vec::new(), exit: EXIT_OK }
    }
}

/// Shortest round-trip digits; exponent form outside `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn warning_lines(s: &SymbolExpr) -> String {
    s.discontinuities()
        .iter()
        .map(|(j, r)| format!("# warning: discontinuous in variable {j} at r = {}\n", rat_to_f64(r)))
        .collect()
}

fn with_config(mut v: serde_json::Value, config: &RunConfig) -> String {
    if let serde_json::Value::Object(map) = &mut v {
        map.insert("run_config".into(), config.json());
    }
    serde_json::to_string_pretty(&v).expect("json serializes") + "\n"
}

/// `m,num,den,float` for the diagonal of a radial `T_f`, `m < cap`.
pub fn cmd_spectrum(config: &RunConfig, symbol: &str) -> Result<String> {
    if config.n != 1 {
        return Err(Error::Invalid("spectrum needs a one-variable symbol (--n 1)".into()));
    }
    let f = parse_symbol(symbol, 1)?;
    let u = f.as_univariate().expect("one variable");
    let cap = config.caps[0];
    let diag = ScaledBandMatrix::from_unisum(&u, cap)
        .diagonal_entries()
        .filter(|_| u.terms().iter().all(|t| t.a == t.b))
        .ok_or_else(|| Error::NotRadial(f.to_string()))?;
    let mut s = config.csv_comment();
    s.push_str(&warning_lines(&f));
    s.push_str("m,num,den,float\n");
    for (m, c) in diag.iter().enumerate() {
        let (num, den) = rat_parts(&c.re);
        let _ = writeln!(s, "{m},{num},{den},{}", fmt_f64(rat_to_f64(&c.re)));
    }
    Ok(s)
}

fn grid_points(n: usize, radii: &[f64], angles: usize) -> Result<Vec<Point>> {
    if radii.iter().any(|r| !(0.0..1.0).contains(r)) {
        return Err(Error::Invalid("grid radii must lie in [0, 1)".into()));
    }
    let mut one: Vec<Complex64> = Vec::new();
    for &r in radii {
        if r == 0.0 {
            one.push(Complex64::new(0.0, 0.0));
        } else {
            for j in 0..angles.max(1) {
                one.push(Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / angles.max(1) as f64));
            }
        }
    }
    let total = one.len().pow(n as u32);
    Ok((0..total)
        .map(|mut idx| {
            let mut coords = vec![Complex64::new(0.0, 0.0); n];
            for c in coords.iter_mut().rev() {
                *c = one[idx % one.len()];
                idx /= one.len();
            }
            Point::new(coords)
        })
        .collect())
}

/// Berezin transform on a polar grid. Operator expressions are truncated at
/// `caps` and report the kernel mass lost; symbols are transformed directly
/// (series for `--exact`, quadrature for `--float`) and report a zero defect.
pub fn cmd_berezin(config: &RunConfig, text: &str, radii: &[f64], angles: usize) -> Result<String> {
    let n = config.n;
    let points = grid_points(n, radii, angles)?;
    let mut values: Vec<(Complex64, f64)> = Vec::with_capacity(points.len());
    let mut warnings = String::new();
    if text.contains("T(") {
        let expr = parse_operator(text, n)?;
        for f in expr.symbols() {
            warnings.push_str(&warning_lines(f));
        }
        let trunc = config.diagnostics().truncation(n)?;
        let pad = config.diagnostics().pad_for(&expr);
        let op = compose(&expr, &trunc, pad, config.mode)?;
        for p in &points {
            values.push((berezin_tensor(&op, p)?, kernel_mass_defect(p, &trunc)));
        }
    } else {
        let f = parse_symbol(text, n)?;
        warnings.push_str(&warning_lines(&f));
        for p in &points {
            let b = match config.mode {
                AssemblyMode::Exact => berezin_symbol_series(&f, p)?,
                AssemblyMode::Quadrature { q_r } => berezin_symbol(&f, p, q_r)?,
            };
            values.push((b, 0.0));
        }
    }
    let mut s = config.csv_comment();
    s.push_str(&warnings);
    for j in 1..=n {
        let _ = write!(s, "p{j}_re,p{j}_im,");
    }
    s.push_str("re,im,kernel_mass_defect\n");
    for (p, (b, d)) in points.iter().zip(values) {
        for c in &p.coords {
            let _ = write!(s, "{},{},", fmt_f64(c.re), fmt_f64(c.im));
        }
        let _ = writeln!(s, "{},{},{}", fmt_f64(b.re), fmt_f64(b.im), fmt_f64(d));
    }
    Ok(s)
}

pub fn cmd_compactness(config: &RunConfig, text: &str) -> Result<String> {
    let expr = parse_operator(text, config.n)?;
    let report = analyze(&expr, &config.diagnostics())?;
    Ok(with_config(serde_json::to_value(&report).expect("report serializes"), config))
}

#[derive(Serialize)]
struct DivideResult {
    divisible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    quotient: Option<String>,
}

pub fn cmd_divide(config: &RunConfig, symbol: &str) -> Result<String> {
    if config.n != 1 {
        return Err(Error::Invalid("divide works on one-variable polynomials (--n 1)".into()));
    }
    let p = PolyZZbar::from_symbol(&parse_symbol(symbol, 1)?)?;
    let q = p.divide_by_one_minus_mod2()?;
    let r = DivideResult { divisible: q.is_some(), quotient: q.map(|q| q.to_string()) };
    Ok(with_config(serde_json::to_value(&r).expect("result serializes"), config))
}

/// The example bundle as JSON and whether every claim held.
pub fn cmd_examples(config: &RunConfig, phi_break: Option<&str>) -> Result<(String, Result<()>)> {
    let phi = match phi_break {
        None => phi_profile(),
        Some(t) => catalog::phi_profile_with_break(
            parse_rat(t).ok_or_else(|| Error::Invalid(format!("bad breakpoint {t}")))?,
        ),
    };
    let bundle = build_examples(&config.diagnostics(), &phi)?;
    let json = with_config(serde_json::to_value(&bundle).expect("bundle serializes"), config);
    Ok((json, bundle.check()))
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Refusal(_) => EXIT_REFUSAL,
        _ => EXIT_FAILURE,
    }
}

/// Runs one command; errors become diagnostics and an exit code.
pub fn run(cli: &Cli) -> Outcome {
    let config = RunConfig::new(&cli.opts, &cli.command);
    let result = match &cli.command {
        Command::Spectrum { symbol } => cmd_spectrum(&config, symbol),
        Command::Berezin { text, radii, angles } => cmd_berezin(&config, text, radii, *angles),
        Command::Compactness { expr } => cmd_compactness(&config, expr),
        Command::Divide { symbol } => cmd_divide(&config, symbol),
        Command::Examples { phi_break } => match cmd_examples(&config, phi_break.as_deref()) {
            Ok((json, Ok(()))) => Ok(json),
            Ok((json, Err(e))) => {
                return Outcome { output: json, diagnostics: vec![e.to_string()], exit: EXIT_FAILURE };
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(s) => Outcome::ok(s),
        Err(e) => Outcome { output: String::new(), diagnostics: vec![e.to_string()], exit: exit_for(&e) },
    }
}
