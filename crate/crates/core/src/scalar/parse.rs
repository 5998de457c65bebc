//! Expression grammar for scalars:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' exponent)?
//! exponent := ['-'] integer | '(' ['-'] integer ')'
//! atom   := integer | name | '(' expr ')'
//! ```
//!
//! Names resolve to the chart's coordinates and units, plus `i` and `tau`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::chart::Chart;
use super::coeff::GaussRat;
use super::{Scalar, ScalarError};

pub fn parse_scalar(src: &str, chart: &Chart) -> Result<Scalar, ScalarError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, chart };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.err("empty expression"));
    }
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    chart: &'a Chart,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ScalarError {
        ScalarError::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let d = self.unary()?;
                acc = acc.checked_div(&d).map_err(|_| ScalarError::Parse {
                    pos: at,
                    msg: "division by zero".into(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, ScalarError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar, ScalarError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let e = if self.eat(b'(') {
            let e = self.signed_int()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)` after exponent"));
            }
            e
        } else {
            self.signed_int()?
        };
        let at = self.pos;
        base.pow(e).map_err(|_| ScalarError::Parse { pos: at, msg: "zero to a negative power".into() })
    }

    fn signed_int(&mut self) -> Result<i32, ScalarError> {
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer exponent"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v: i32 = s.parse().map_err(|_| self.err("exponent out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn atom(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = s.parse().expect("digits");
                Ok(Scalar::constant(GaussRat::from_rational(BigRational::from_integer(n))))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match name {
                    "i" => Ok(Scalar::i()),
                    "tau" => Ok(Scalar::tau()),
                    _ => {
                        if let Some(k) = self.chart.index_of(name) {
                            Ok(Scalar::var(self.chart.var(k)))
                        } else if let Some(v) = self.chart.unit_var(name) {
                            Ok(Scalar::var(v))
                        } else {
                            Err(ScalarError::UnknownCoordinate(name.to_string()))
                        }
                    }
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ChartRef;

    fn chart() -> ChartRef {
        Chart::builder("p").coord("pa").coord("pb").coord("t").unit("et", "t", 1, 1).build().unwrap()
    }

    #[test]
    fn precedence() {
        let c = chart();
        let a = parse_scalar("-pa^2 + 2*pa*pb/pb", &c).unwrap();
        let b = parse_scalar("2*pa - pa*pa", &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn negative_exponents() {
        let c = chart();
        assert_eq!(parse_scalar("pa^(-2)", &c).unwrap(), parse_scalar("1/(pa*pa)", &c).unwrap());
        assert_eq!(parse_scalar("et^-1*et", &c).unwrap(), Scalar::one());
    }

    #[test]
    fn errors() {
        let c = chart();
        assert_eq!(parse_scalar("zz", &c), Err(ScalarError::UnknownCoordinate("zz".into())));
        assert!(matches!(parse_scalar("pa +", &c), Err(ScalarError::Parse { .. })));
        assert!(matches!(parse_scalar("1/(pa-pa)", &c), Err(ScalarError::Parse { .. })));
        assert!(matches!(parse_scalar("(pa", &c), Err(ScalarError::Parse { .. })));
    }

    #[test]
    fn display_round_trip() {
        let c = chart();
        for e in ["(pa^2 - i*pb)/(pa + 1)", "tau*et^(-1)*pa", "-1/2*pa + 3", "(1+2*i)*pb^3"] {
            let v = parse_scalar(e, &c).unwrap();
            let back = parse_scalar(&v.to_string(), &c).unwrap();
            assert_eq!(v, back, "{e} -> {v}");
        }
    }
}
