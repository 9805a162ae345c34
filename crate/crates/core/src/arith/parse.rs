//! Readers for the canonical text forms produced by `Display`.

use num_traits::One;

use super::monomial::Monomial;
use super::poly::Polynomial;
use super::ratfn::{DenominatorFactor, RationalFunction};
use super::scalar::{parse_scalar, Scalar};
use super::series::TruncatedSeries;
use crate::error::{Error, Result};

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Cursor {
            s: s.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
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
            Err(self.err(&format!("expected {:?}", c as char)))
        }
    }

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).expect("ascii"))
    }

    fn uint(&mut self) -> Result<u32> {
        let d = self.digits()?;
        d.parse().map_err(|_| self.err("exponent out of range"))
    }

    fn done(&mut self) -> bool {
        self.peek().is_none()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!(
            "{msg} at byte {} of {:?}",
            self.pos,
            String::from_utf8_lossy(self.s)
        ))
    }
}

fn factor(c: &mut Cursor<'_>, arity: usize, coef: &mut Scalar, exps: &mut [u32]) -> Result<()> {
    match c.peek() {
        Some(b'0'..=b'9') => {
            let num = c.digits()?;
            let x = if c.eat(b'/') {
                let den = c.digits()?;
                parse_scalar(&format!("{num}/{den}"))?
            } else {
                parse_scalar(num)?
            };
            *coef *= x;
            Ok(())
        }
        Some(b'q') => {
            c.pos += 1;
            let v = match c.s.get(c.pos) {
                Some(b) if b.is_ascii_digit() => c.uint()? as usize,
                _ => 0,
            };
            if v >= arity {
                return Err(c.err(&format!("variable index {v} exceeds arity {arity}")));
            }
            let e = if c.eat(b'^') { c.uint()? } else { 1 };
            exps[v] += e;
            Ok(())
        }
        _ => Err(c.err("expected a number or a variable")),
    }
}

fn polynomial(c: &mut Cursor<'_>, arity: usize) -> Result<Polynomial> {
    let mut terms = Vec::new();
    let mut first = true;
    loop {
        let mut sign = Scalar::one();
        if c.eat(b'-') {
            sign = -sign;
        } else if !first && !c.eat(b'+') {
            break;
        }
        first = false;
        let mut coef = sign;
        let mut exps = vec![0u32; arity];
        factor(c, arity, &mut coef, &mut exps)?;
        while c.eat(b'*') {
            factor(c, arity, &mut coef, &mut exps)?;
        }
        terms.push((Monomial::from_exponents(&exps), coef));
        match c.peek() {
            Some(b'+') | Some(b'-') => continue,
            _ => break,
        }
    }
    Ok(Polynomial::from_terms(arity, terms))
}

/// Parses a polynomial in the variables `q, q1, …, q{arity-1}`.
pub fn parse_polynomial(s: &str, arity: usize) -> Result<Polynomial> {
    let mut c = Cursor::new(s);
    let p = polynomial(&mut c, arity)?;
    if !c.done() {
        return Err(c.err("trailing input"));
    }
    Ok(p)
}

/// Parses `N` or `(N)/((F1)^e1*(F2)*…)`.
pub fn parse_rational_function(s: &str, arity: usize) -> Result<RationalFunction> {
    let mut c = Cursor::new(s);
    if c.peek() != Some(b'(') {
        return Ok(RationalFunction::from_polynomial(parse_polynomial(
            s, arity,
        )?));
    }
    c.expect(b'(')?;
    let num = polynomial(&mut c, arity)?;
    c.expect(b')')?;
    c.expect(b'/')?;
    c.expect(b'(')?;
    let mut factors = Vec::new();
    loop {
        c.expect(b'(')?;
        let p = polynomial(&mut c, arity)?;
        c.expect(b')')?;
        let e = if c.eat(b'^') { c.uint()? } else { 1 };
        factors.push(DenominatorFactor::new(p, e));
        if !c.eat(b'*') {
            break;
        }
    }
    c.expect(b')')?;
    if !c.done() {
        return Err(c.err("trailing input"));
    }
    if factors.iter().any(|f| f.polynomial.is_zero()) {
        return Err(Error::Parse("zero denominator factor".into()));
    }
    RationalFunction::new(num, factors)
}

/// Parses `[orders=a,b,…;total=T|none] P`.
pub fn parse_series(s: &str) -> Result<TruncatedSeries> {
    let s = s.trim();
    let rest = s
        .strip_prefix("[orders=")
        .ok_or_else(|| Error::Parse(format!("series must start with [orders=: {s:?}")))?;
    let (head, body) = rest
        .split_once(']')
        .ok_or_else(|| Error::Parse("unterminated series header".into()))?;
    let (ords, total) = head
        .split_once(";total=")
        .ok_or_else(|| Error::Parse("series header lacks total".into()))?;
    let orders = ords
        .split(',')
        .map(|o| {
            o.trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad order {o:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let total = match total.trim() {
        "none" => None,
        t => Some(
            t.parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad total {t:?}")))?,
        ),
    };
    let p = parse_polynomial(body, orders.len())?;
    if p.terms().iter().any(|(m, _)| !m.within(&orders, total)) {
        return Err(Error::Parse("series term outside its truncation".into()));
    }
    Ok(TruncatedSeries::from_polynomial(&p, orders, total))
}

impl std::str::FromStr for TruncatedSeries {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_series(s)
    }
}

#[cfg(test)]
mod tests {
    use super::super::scalar::ratio;
    use super::*;

    #[test]
    fn polynomial_round_trip() {
        for s in [
            "0",
            "1",
            "-3/4",
            "q - q1^2",
            "-1/2*q*q2^3 + 7*q1",
            "1 - q^4 - q^6",
        ] {
            let p = parse_polynomial(s, 3).unwrap();
            assert_eq!(parse_polynomial(&p.to_string(), 3).unwrap(), p);
        }
        let p = parse_polynomial("2*q*3/4", 1).unwrap();
        assert_eq!(p.coefficient(&Monomial::var(1, 0, 1)), ratio(3, 2));
    }

    #[test]
    fn rational_function_round_trip() {
        let s = "(1 - q^4 - q^6)/((1 - q)^2*(1 + q)*(1 + q^2))";
        let f = parse_rational_function(s, 1).unwrap();
        assert_eq!(parse_rational_function(&f.to_string(), 1).unwrap(), f);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_polynomial("q3", 2).is_err());
        assert!(parse_polynomial("q +", 2).is_err());
        assert!(parse_rational_function("(1)/((0))", 1).is_err());
        assert!(parse_rational_function("(1)/((q))", 1).is_err());
        assert!(parse_series("q").is_err());
    }

    #[test]
    fn series_round_trip() {
        let s = parse_series("[orders=2,3;total=4] 1 + q*q1^3 - 2*q1").unwrap();
        assert_eq!(s.total(), Some(4));
        assert_eq!(parse_series(&s.to_string()).unwrap(), s);
        assert!(parse_series("[orders=1;total=none] q^2").is_err());
    }
}
