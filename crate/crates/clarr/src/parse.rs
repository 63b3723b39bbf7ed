//! Parser for the element literals used on the command line and in
//! arrangement JSON: rationals `a/b`, radicals `sqrt(d)`, the imaginary unit
//! `i`, with `+ - *` and parentheses. This is the inverse of the element
//! pretty-printer: every printed element parses back to an equal value.

use crate::qtower::{QtowerError, Rat, TowerElem};
use num::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("parse error at byte {at}: {message}")]
    Syntax { at: usize, message: String },
    #[error("expected a rational value, got {0}")]
    NotRational(String),
    #[error(transparent)]
    Tower(#[from] QtowerError),
}

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            at: self.pos,
            message: message.into(),
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", b as char)))
        }
    }

    fn expr(&mut self) -> Result<TowerElem, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<TowerElem, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<TowerElem, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'i') => {
                self.pos += 1;
                if let Some(&b) = self.src.get(self.pos) {
                    if b.is_ascii_alphanumeric() {
                        return Err(self.err("unexpected characters after 'i'"));
                    }
                }
                Ok(TowerElem::sqrt_int(-1)?)
            }
            Some(b's') => self.radical(),
            Some(b) if b.is_ascii_digit() => self.rational(),
            Some(b) => Err(self.err(format!("unexpected character '{}'", b as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn radical(&mut self) -> Result<TowerElem, ParseError> {
        self.skip_ws();
        if !self.src[self.pos..].starts_with(b"sqrt") {
            return Err(self.err("expected 'sqrt'"));
        }
        self.pos += 4;
        self.expect(b'(')?;
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let digits = self.digits()?;
        let mut d: i64 = digits
            .parse()
            .map_err(|_| self.err("radicand does not fit in an integer"))?;
        if neg {
            d = -d;
        }
        self.expect(b')')?;
        Ok(TowerElem::sqrt_int(d)?)
    }

    fn rational(&mut self) -> Result<TowerElem, ParseError> {
        let numer: BigInt = self.digits()?.parse().expect("digit string");
        let denom: BigInt = if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let d: BigInt = self.digits()?.parse().expect("digit string");
            if d == BigInt::from(0) {
                return Err(self.err("zero denominator"));
            }
            d
        } else {
            BigInt::from(1)
        };
        Ok(TowerElem::from_rat(Rat::new(numer, denom)))
    }

    fn digits(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .to_string())
    }
}

/// Parse an element literal like `2*sqrt(2) + 1/2` or `-3*sqrt(5)-7`.
pub fn parse_tower_elem(s: &str) -> Result<TowerElem, ParseError> {
    let mut p = Scanner {
        src: s.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Parse a literal that must denote a rational number.
pub fn parse_rat(s: &str) -> Result<Rat, ParseError> {
    let e = parse_tower_elem(s)?;
    e.as_rat()
        .cloned()
        .ok_or_else(|| ParseError::NotRational(s.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qtower::rat;

    #[test]
    fn rationals_and_radicals() {
        assert_eq!(parse_tower_elem("7").unwrap(), TowerElem::from_int(7));
        assert_eq!(
            parse_tower_elem("-3/4").unwrap(),
            TowerElem::from_rat(rat(-3, 4))
        );
        let s2 = TowerElem::sqrt_int(2).unwrap();
        assert_eq!(parse_tower_elem("sqrt(2)").unwrap(), s2);
        assert_eq!(parse_tower_elem("sqrt(8)").unwrap(), s2.mul(&TowerElem::from_int(2)));
        assert_eq!(parse_tower_elem("sqrt(4)").unwrap(), TowerElem::from_int(2));
        assert_eq!(
            parse_tower_elem("i").unwrap(),
            TowerElem::sqrt_int(-1).unwrap()
        );
        assert_eq!(
            parse_tower_elem("i*sqrt(2)").unwrap(),
            TowerElem::sqrt_int(-2).unwrap()
        );
    }

    #[test]
    fn precedence_and_parens() {
        let s5 = TowerElem::sqrt_int(5).unwrap();
        let want = s5.mul(&TowerElem::from_int(-3)).sub(&TowerElem::from_int(7));
        assert_eq!(parse_tower_elem("-3*sqrt(5)-7").unwrap(), want);
        let grouped = parse_tower_elem("-3*(sqrt(5)+7)").unwrap();
        assert_eq!(
            grouped,
            s5.add(&TowerElem::from_int(7)).mul(&TowerElem::from_int(-3))
        );
        assert_eq!(
            parse_tower_elem(" ( 1 + 1/2 ) * 2 ").unwrap(),
            TowerElem::from_int(3)
        );
    }

    #[test]
    fn printer_roundtrip() {
        let s2 = TowerElem::sqrt_int(2).unwrap();
        let s5 = TowerElem::sqrt_int(5).unwrap();
        let i = TowerElem::sqrt_int(-1).unwrap();
        let samples = [
            TowerElem::from_rat(rat(-22, 7)),
            s2.mul(&TowerElem::from_int(2)).add(&TowerElem::from_rat(rat(1, 2))),
            s2.mul(&s5).add(&s5.mul(&TowerElem::from_int(-3))),
            i.mul(&s5).sub(&TowerElem::from_int(1)),
            TowerElem::sqrt_int(-10).unwrap().add(&s2),
        ];
        for e in samples {
            let printed = e.to_string();
            let back = parse_tower_elem(&printed).unwrap();
            assert_eq!(back, e, "roundtrip of {}", printed);
        }
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_tower_elem("").is_err());
        assert!(parse_tower_elem("1/0").is_err());
        assert_eq!(parse_tower_elem("sqrt(0)").unwrap(), TowerElem::from_int(0));
        assert!(parse_tower_elem("sqrt 2").is_err());
        assert!(parse_tower_elem("2 +").is_err());
        assert!(parse_tower_elem("(1").is_err());
        assert!(parse_tower_elem("1)").is_err());
        assert!(parse_tower_elem("x + 1").is_err());
        assert!(parse_tower_elem("1 2").is_err());
        assert!(parse_rat("sqrt(2)").is_err());
        assert_eq!(parse_rat("-10").unwrap(), rat(-10, 1));
    }
}
