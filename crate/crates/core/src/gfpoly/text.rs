//! Canonical printing and parsing of polynomials in `t`.
//!
//! Printed form lists terms by descending power joined by ` + `, e.g.
//! `t^3 + 2*t + 1`. The parser accepts terms `c`, `t`, `c*t^k`, `t^k` joined
//! by `+`/`-`, with an optional leading minus; coefficients reduce mod `p`.

use std::fmt;

use num_bigint::BigInt;

use super::{GfPoly, PrimeField};
use crate::error::{Error, Result};

impl fmt::Display for GfPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs().iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (k, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => f.write_str("t")?,
                (1, _) => write!(f, "{c}*t")?,
                (_, 1) => write!(f, "t^{k}")?,
                _ => write!(f, "{c}*t^{k}")?,
            }
        }
        Ok(())
    }
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
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

    fn error(&self, message: impl Into<String>) -> Error {
        Error::PolyParse {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn number(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }

    fn exponent(&mut self) -> Result<usize> {
        if !self.eat(b'^') {
            return Ok(1);
        }
        let at = self.pos;
        let k = self.number()?;
        usize::try_from(k)
            .ok()
            .filter(|k| *k <= 1 << 16)
            .ok_or(Error::PolyParse {
                offset: at,
                message: "exponent too large".into(),
            })
    }

    /// One term as `(coefficient, power)`.
    fn term(&mut self) -> Result<(BigInt, usize)> {
        match self.peek() {
            Some(b't') => {
                self.pos += 1;
                Ok((BigInt::from(1), self.exponent()?))
            }
            Some(c) if c.is_ascii_digit() => {
                let c = self.number()?;
                if self.eat(b'*') {
                    if !self.eat(b't') {
                        return Err(self.error("expected `t` after `*`"));
                    }
                    Ok((c, self.exponent()?))
                } else {
                    Ok((c, 0))
                }
            }
            Some(_) => Err(self.error("expected a term")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

impl GfPoly {
    /// Parses the text syntax described in the module docs.
    pub fn parse(field: PrimeField, text: &str) -> Result<GfPoly> {
        let mut cur = Cursor {
            src: text.as_bytes(),
            pos: 0,
        };
        let mut coeffs: Vec<u64> = Vec::new();
        let mut negative = cur.eat(b'-');
        loop {
            let (c, k) = cur.term()?;
            let c = field.reduce_big(&if negative { -c } else { c });
            if coeffs.len() <= k {
                coeffs.resize(k + 1, 0);
            }
            coeffs[k] = field.add(coeffs[k], c);
            match cur.peek() {
                None => break,
                Some(b'+') => {
                    cur.pos += 1;
                    negative = false;
                }
                Some(b'-') => {
                    cur.pos += 1;
                    negative = true;
                }
                Some(_) => return Err(cur.error("expected `+`, `-` or end of input")),
            }
        }
        Ok(GfPoly::new(field, coeffs))
    }
}
