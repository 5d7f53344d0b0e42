//! Recursive-descent parser for the symbol and operator text forms.
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)*
//! atom   := number | 'i' | coord | 'conj(' expr ')' | '(' expr ')' | '-' atom
//!         | 'radial(' coord ';' piece (',' piece)* ')'
//! piece  := '[' rat ',' rat ']' ':' poly-in-r
//! number := digits ['/' digits | '.' digits]
//! coord  := 'z' digits
//! ```
//!
//! Operator text is `[number '*'] T(expr) ('*' T(expr))*` joined by `+`/`-`.

use crate::error::{Error, Result};
use crate::opexpr::{OpProduct, OperatorExpr};
use crate::rational::{crat_i, crat_one, crat_real, parse_rat, CRat, Rat};
use crate::symbols::{rpoly_trim, PiecewiseRadial, RPoly, RadialPiece, SymbolExpr};
use num_traits::{One, Zero};

/// Parses a symbol on the `n`-polydisc.
pub fn parse_symbol(text: &str, n: usize) -> Result<SymbolExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, n };
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses `T(f1)*T(f2) + c*T(f3) - ...`.
pub fn parse_operator(text: &str, n: usize) -> Result<OperatorExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, n };
    let mut products = Vec::new();
    let mut sign = crat_one();
    p.skip_ws();
    if p.eat(b'-') {
        sign = -sign;
    }
    loop {
        products.push(p.op_product(sign.clone())?);
        p.skip_ws();
        if p.eat(b'+') {
            sign = crat_one();
        } else if p.eat(b'-') {
            sign = -crat_one();
        } else {
            break;
        }
    }
    p.finish()?;
    OperatorExpr::new(n, products)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { offset: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn finish(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(())
    }

    fn digits(&mut self) -> Option<&str> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn uint(&mut self) -> Result<u32> {
        self.skip_ws();
        let at = self.pos;
        match self.digits().map(str::parse::<u32>) {
            Some(Ok(v)) => Ok(v),
            _ => {
                self.pos = at;
                self.err("expected unsigned integer")
            }
        }
    }

    /// Unsigned `p`, `p/q` or `a.b`.
    fn number(&mut self) -> Result<Rat> {
        self.skip_ws();
        let start = self.pos;
        if self.digits().is_none() {
            return self.err("expected number");
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'/' || self.src[self.pos] == b'.') {
            self.pos += 1;
            if self.digits().is_none() {
                return self.err("expected digits");
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match parse_rat(text) {
            Some(r) => Ok(r),
            None => {
                self.pos = start;
                self.err("invalid number")
            }
        }
    }

    fn coord(&mut self) -> Result<usize> {
        self.skip_ws();
        let at = self.pos;
        if !self.eat(b'z') {
            return self.err("expected coordinate zK");
        }
        let k = match self.digits().map(str::parse::<usize>) {
            Some(Ok(k)) => k,
            _ => return self.err("expected coordinate index"),
        };
        if k == 0 || k > self.n {
            self.pos = at;
            return self.err(format!("coordinate z{k} out of range for dimension {}", self.n));
        }
        Ok(k)
    }

    fn expr(&mut self) -> Result<SymbolExpr> {
        let mut acc = if self.eat(b'-') { self.term()?.neg() } else { self.term()? };
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SymbolExpr> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SymbolExpr> {
        let mut base = self.atom()?;
        while self.eat(b'^') {
            let e = self.uint()?;
            base = base.pow(e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SymbolExpr> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'-') => {
                self.pos += 1;
                Ok(self.atom()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(SymbolExpr::constant(self.n, crat_real(self.number()?))),
            Some(b'z') => {
                let k = self.coord()?;
                SymbolExpr::coord(self.n, k)
            }
            Some(_) => {
                if self.eat_keyword("conj") {
                    self.expect(b'(')?;
                    let e = self.expr()?;
                    self.expect(b')')?;
                    Ok(e.conj())
                } else if self.eat_keyword("radial") {
                    self.radial()
                } else if self.eat(b'i') {
                    Ok(SymbolExpr::constant(self.n, crat_i()))
                } else {
                    self.err("unexpected character")
                }
            }
        }
    }

    fn radial(&mut self) -> Result<SymbolExpr> {
        self.expect(b'(')?;
        let k = self.coord()?;
        self.expect(b';')?;
        let at = self.pos;
        let mut pieces = vec![self.piece()?];
        while self.eat(b',') {
            pieces.push(self.piece()?);
        }
        self.expect(b')')?;
        let rho = PiecewiseRadial::new(pieces).map_err(|e| Error::Parse { offset: at, message: e.to_string() })?;
        SymbolExpr::radial(self.n, k, rho)
    }

    fn piece(&mut self) -> Result<RadialPiece> {
        self.expect(b'[')?;
        let lo = self.number()?;
        self.expect(b',')?;
        let hi = self.number()?;
        self.expect(b']')?;
        self.expect(b':')?;
        Ok(RadialPiece { lo, hi, poly: self.poly_in_r()? })
    }

    /// Signed sum of `c`, `c*r^k`, `c r^k` or `r^k`.
    fn poly_in_r(&mut self) -> Result<RPoly> {
        let mut poly: RPoly = Vec::new();
        let mut first = true;
        loop {
            let neg = if self.eat(b'-') {
                true
            } else if !first && self.eat(b'+') {
                false
            } else if first {
                false
            } else {
                break;
            };
            first = false;
            let mut coeff = Rat::one();
            let mut has_coeff = false;
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                coeff = self.number()?;
                has_coeff = true;
                self.eat(b'*');
            }
            let mut power = 0usize;
            if self.eat(b'r') {
                power = 1;
                if self.eat(b'^') {
                    power = self.uint()? as usize;
                }
            } else if !has_coeff {
                return self.err("expected coefficient or r");
            }
            if poly.len() <= power {
                poly.resize(power + 1, Rat::zero());
            }
            poly[power] += if neg { -coeff } else { coeff };
        }
        rpoly_trim(&mut poly);
        Ok(poly)
    }

    fn op_product(&mut self, sign: CRat) -> Result<OpProduct> {
        let mut coeff = sign;
        let mut factors = Vec::new();
        if self.peek().is_some_and(|c| c != b'T') {
            coeff *= self.op_scalar()?;
            self.expect(b'*')?;
        }
        loop {
            if !self.eat_keyword("T") {
                return self.err("expected T(...)");
            }
            self.expect(b'(')?;
            factors.push(self.expr()?);
            self.expect(b')')?;
            if !self.eat(b'*') {
                break;
            }
        }
        Ok(OpProduct { coeff, factors })
    }

    /// A constant scalar, e.g. `2`, `1/3` or `(1 + 2*i)`.
    fn op_scalar(&mut self) -> Result<CRat> {
        let at = self.pos;
        let e = self.factor()?;
        if e.is_zero() {
            return Ok(crat_real(Rat::zero()));
        }
        match e.terms() {
            [t] if t.factors.iter().all(|u| u.as_constant().is_some()) => {
                Ok(t.factors.iter().fold(t.coeff.clone(), |c, u| c * u.as_constant().unwrap()))
            }
            _ => Err(Error::Parse { offset: at, message: "operator coefficient must be constant".into() }),
        }
    }
}
