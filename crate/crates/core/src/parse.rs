//! Text grammar shared by forms and polynomials.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := integer | 'x' index | '(' expr ')'
//! ```
//!
//! Variables are `x0` .. `x31`; whitespace is ignored.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub const MAX_VARS: usize = 32;

/// A polynomial over the 32 absolute variable slots, before it is cut down to
/// the variables a caller cares about.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct RawPoly {
    pub terms: BTreeMap<[u32; MAX_VARS], BigInt>,
}

impl RawPoly {
    fn constant(c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; MAX_VARS], c);
        }
        RawPoly { terms }
    }

    fn var(i: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, BigInt::one());
        RawPoly { terms }
    }

    fn add(mut self, other: &RawPoly, sign: i32) -> Self {
        for (e, c) in &other.terms {
            let entry = self.terms.entry(*e).or_insert_with(BigInt::zero);
            if sign < 0 {
                *entry -= c;
            } else {
                *entry += c;
            }
            if entry.is_zero() {
                self.terms.remove(e);
            }
        }
        self
    }

    fn mul(&self, other: &RawPoly) -> Self {
        let mut out = RawPoly::default();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = [0; MAX_VARS];
                for i in 0..MAX_VARS {
                    e[i] = ea[i] + eb[i];
                }
                let entry = out.terms.entry(e).or_insert_with(BigInt::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    out.terms.remove(&e);
                }
            }
        }
        out
    }

    /// Smallest and largest variable index that occurs, if any.
    pub fn var_span(&self) -> Option<(usize, usize)> {
        let mut lo = usize::MAX;
        let mut hi = 0;
        for e in self.terms.keys() {
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    lo = lo.min(i);
                    hi = hi.max(i);
                }
            }
        }
        (lo != usize::MAX).then_some((lo, hi))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
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

    fn digits(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn expr(&mut self) -> Result<RawPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t, 1);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t, -1);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RawPoly> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.unary()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RawPoly> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(RawPoly::default().add(&inner, -1));
        }
        self.power()
    }

    fn power(&mut self) -> Result<RawPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e: u32 = match self.digits()?.parse() {
                Ok(e) => e,
                Err(_) => return self.err("exponent too large"),
            };
            let mut acc = RawPoly::constant(BigInt::one());
            for _ in 0..e {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RawPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'x') | Some(b'X') => {
                self.pos += 1;
                let idx: usize = match self.digits()?.parse() {
                    Ok(i) => i,
                    Err(_) => return self.err("bad variable index"),
                };
                if idx >= MAX_VARS {
                    return self.err(format!("variable index {idx} exceeds x{}", MAX_VARS - 1));
                }
                Ok(RawPoly::var(idx))
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits()?;
                Ok(RawPoly::constant(d.parse::<BigInt>().unwrap()))
            }
            Some(c) => self.err(format!("unexpected '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

pub(crate) fn parse_raw(text: &str) -> Result<RawPoly> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let poly = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_signs() {
        let a = parse_raw("x0*x1 - x2^2 - x3^2 + 2*x4^2").unwrap();
        let b = parse_raw("-(x2^2) + x1*x0 + 2 * x4 ^ 2 - x3*x3").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.var_span(), Some((0, 4)));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_raw("x0 +").is_err());
        assert!(parse_raw("x32").is_err());
        assert!(parse_raw("x0 y").is_err());
        assert!(parse_raw("2^").is_err());
    }

    #[test]
    fn cancellation_gives_zero() {
        let z = parse_raw("x1 - x1").unwrap();
        assert!(z.terms.is_empty());
        assert_eq!(z.var_span(), None);
    }
}
