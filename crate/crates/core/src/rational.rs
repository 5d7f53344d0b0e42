//! Exact scalar helpers shared by the symbolic and exact-matrix paths.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Write;

pub type Rat = BigRational;
/// Complex number with exact rational parts.
pub type CRat = Complex<BigRational>;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn crat(re: Rat, im: Rat) -> CRat {
    Complex::new(re, im)
}

pub fn crat_real(re: Rat) -> CRat {
    Complex::new(re, Rat::zero())
}

pub fn crat_one() -> CRat {
    crat_real(Rat::one())
}

pub fn crat_zero() -> CRat {
    crat_real(Rat::zero())
}

pub fn crat_i() -> CRat {
    Complex::new(Rat::zero(), Rat::one())
}

pub fn is_crat_zero(c: &CRat) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // ToPrimitive on BigRational is correctly rounded for moderate sizes; fall
    // back to a scaled division when either part overflows f64.
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let n = r.numer().bits() as i64;
    let d = r.denom().bits() as i64;
    let shift = n - d;
    let scaled = if shift > 0 {
        r / Rat::from_integer(BigInt::one() << (shift as usize))
    } else {
        r * Rat::from_integer(BigInt::one() << ((-shift) as usize))
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
}

pub fn crat_to_c64(c: &CRat) -> Complex64 {
    Complex64::new(rat_to_f64(&c.re), rat_to_f64(&c.im))
}

/// Exact dyadic conversion of a finite float.
pub fn f64_to_rat(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

pub fn rat_pow(r: &Rat, e: u32) -> Rat {
    num_traits::pow(r.clone(), e as usize)
}

pub fn crat_pow(c: &CRat, e: u32) -> CRat {
    let mut acc = crat_one();
    for _ in 0..e {
        acc *= c.clone();
    }
    acc
}

/// Integer power for exponents that may be negative; `c` must be a unit
/// (|c| = 1) when `e < 0`, so the inverse is the conjugate.
pub fn crat_unit_pow(c: &CRat, e: i64) -> CRat {
    if e >= 0 {
        crat_pow(c, e as u32)
    } else {
        crat_pow(&c.conj(), (-e) as u32)
    }
}

pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders a complex rational so that the symbol grammar parses it back.
/// Real numbers print bare; anything with an imaginary part is parenthesised.
pub fn format_crat(c: &CRat) -> String {
    if c.im.is_zero() {
        return format_rat(&c.re);
    }
    let mut s = String::from("(");
    if !c.re.is_zero() {
        s.push_str(&format_rat(&c.re));
        s.push_str(if c.im.is_negative() { " - " } else { " + " });
        let _ = write!(s, "{}*i", format_rat(&c.im.abs()));
    } else {
        let _ = write!(s, "{}*i", format_rat(&c.im));
    }
    s.push(')');
    s
}

/// Real and imaginary parts both as (numerator, denominator) strings.
pub fn rat_parts(r: &Rat) -> (String, String) {
    (r.numer().to_string(), r.denom().to_string())
}

/// Ordering key for exact complex values (lexicographic on re, then im).
pub fn crat_key(c: &CRat) -> (Rat, Rat) {
    (c.re.clone(), c.im.clone())
}

/// |c|^2 == 1 exactly.
pub fn is_unimodular(c: &CRat) -> bool {
    (&c.re * &c.re + &c.im * &c.im).is_one()
}

/// Parses `p`, `p/q`, or a decimal `a.b` into an exact rational.
pub fn parse_rat(text: &str) -> Option<Rat> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches('-');
        let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = Rat::new(n, d);
        return Some(if neg { -r } else { r });
    }
    Some(Rat::from_integer(t.parse().ok()?))
}
