//! Parser for the polynomial text grammar used in rule files.
//!
//! ```text
//! expr    = term , { ("+" | "-") , term } ;
//! term    = unary , { "*" , unary } ;
//! unary   = "-" , unary | power ;
//! power   = atom , [ "^" , integer ] ;
//! atom    = number | variable | "(" , expr , ")" ;
//! number  = integer , [ "/" , integer ] ;
//! variable = "x" , integer , "_" , integer ;
//! ```
//!
//! Whitespace is ignored everywhere. `x<m>_<i>` names coordinate `i` of
//! memory element `m`.

use num_bigint::BigInt;

use super::field::Field;
use super::poly::MultiPoly;
use crate::error::{Error, Result};

/// Parses `text` into a polynomial over `field` with `nvars` variables.
/// `resolve(m, i)` maps variable `x<m>_<i>` to its index, or returns
/// `None` if the variable is not declared.
pub fn parse_poly<R>(text: &str, field: Field, nvars: usize, resolve: R) -> Result<MultiPoly>
where
    R: Fn(usize, usize) -> Option<usize>,
{
    let mut p = Parser {
        chars: text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(),
        pos: 0,
        field,
        nvars,
        resolve: &resolve,
        len: text.chars().count(),
    };
    if p.chars.is_empty() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Convenience wrapper for the common layout: memory size `arity`,
/// dimension `dim`, variable `x<m>_<i>` at index `m*dim + i`.
pub fn parse_rule_body(text: &str, field: Field, arity: usize, dim: usize) -> Result<MultiPoly> {
    parse_poly(text, field, arity * dim, |m, i| {
        (m < arity && i < dim).then_some(m * dim + i)
    })
}

/// The name of variable `index` in the standard layout.
pub fn variable_name(index: usize, dim: usize) -> String {
    format!("x{}_{}", index / dim, index % dim)
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    field: Field,
    nvars: usize,
    resolve: &'a dyn Fn(usize, usize) -> Option<usize>,
    len: usize,
}

impl Parser<'_> {
    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|(i, _)| i + 1)
            .unwrap_or(self.len + 1)
    }

    fn error(&self, message: &str) -> Error {
        Error::PolySyntax {
            column: self.column(),
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.bump();
            let rhs = self.term()?;
            acc = if c == '+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        while self.peek() == Some('*') {
            self.bump();
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        if self.peek() == Some('-') {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.bump();
            let start = self.pos;
            let e = self.integer()?;
            let e = u32::try_from(e).map_err(|_| {
                self.pos = start;
                self.error("exponent too large")
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.bump();
                Ok(e)
            }
            Some('x') => {
                let start = self.pos;
                self.bump();
                let m = self.integer()?;
                if self.peek() != Some('_') {
                    return Err(self.error("expected '_' in variable name"));
                }
                self.bump();
                let i = self.integer()?;
                let idx = usize::try_from(m)
                    .ok()
                    .zip(usize::try_from(i).ok())
                    .and_then(|(m, i)| (self.resolve)(m, i));
                match idx {
                    Some(v) if v < self.nvars => Ok(MultiPoly::var(self.field, self.nvars, v)),
                    _ => {
                        self.pos = start;
                        Err(self.error(&format!("undeclared variable x{m}_{i}")))
                    }
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.bigint()?;
                let den = if self.peek() == Some('/') {
                    self.bump();
                    self.bigint()?
                } else {
                    BigInt::from(1)
                };
                let value = self
                    .field
                    .from_fraction(&num, &den)
                    .ok_or_else(|| self.error("denominator vanishes in the field"))?;
                Ok(MultiPoly::constant(self.field, self.nvars, value))
            }
            Some(_) => Err(self.error("expected a number, variable or '('")),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn digits(&mut self) -> Result<String> {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        if s.is_empty() {
            return Err(self.error("expected digits"));
        }
        Ok(s)
    }

    fn integer(&mut self) -> Result<u64> {
        let start = self.pos;
        let s = self.digits()?;
        s.parse().map_err(|_| {
            self.pos = start;
            self.error("integer out of range")
        })
    }

    fn bigint(&mut self) -> Result<BigInt> {
        let s = self.digits()?;
        Ok(s.parse().expect("digit string"))
    }
}
