//! Text form of elements.
//!
//! ```text
//! polynomial := [sign] term (("+"|"-") term)*
//! term       := [coeff "*"?] factor ("*" factor)* | coeff
//! factor     := name ("^" uint)?
//! coeff      := int ["/" uint]
//! name       := letter (letter|digit|"_")*
//! ```
//! Whitespace between tokens is ignored and `#` starts a comment running to
//! the end of the line.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Algebra, Element, Q};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            b'^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            b'/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((start, Tok::Int(n)));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Name(text[start..i].to_string())));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{ch}`") });
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    alg: &'a Algebra,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn polynomial(&mut self) -> Result<Element> {
        let mut total = Element::zero();
        let mut negative = match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                true
            }
            Some(Tok::Plus) => {
                self.at += 1;
                false
            }
            _ => false,
        };
        loop {
            let t = self.term()?;
            if negative {
                total -= &t;
            } else {
                total += &t;
            }
            match self.peek() {
                None => return Ok(total),
                Some(Tok::Plus) => negative = false,
                Some(Tok::Minus) => negative = true,
                Some(_) => return self.err("expected `+`, `-` or end of input"),
            }
            self.at += 1;
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(n),
            _ => {
                self.at -= 1;
                self.err("expected an unsigned integer")
            }
        }
    }

    fn term(&mut self) -> Result<Element> {
        let mut coeff = Q::one();
        let mut have_coeff = false;
        if let Some(Tok::Int(_)) = self.peek() {
            let num = self.uint()?;
            let mut c = Q::from_integer(num);
            if let Some(Tok::Slash) = self.peek() {
                self.at += 1;
                let den = self.uint()?;
                if den.is_zero() {
                    self.at -= 1;
                    return self.err("zero denominator");
                }
                c /= Q::from_integer(den);
            }
            coeff = c;
            have_coeff = true;
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    if !matches!(self.peek(), Some(Tok::Name(_))) {
                        return self.err("expected a generator name after `*`");
                    }
                }
                Some(Tok::Name(_)) => {}
                _ => return Ok(self.alg.scalar(coeff)),
            }
        }
        if !matches!(self.peek(), Some(Tok::Name(_))) {
            return if have_coeff { Ok(self.alg.scalar(coeff)) } else { self.err("expected a term") };
        }
        let mut value = self.alg.scalar(coeff);
        let mut used_odd = vec![false; self.alg.len()];
        loop {
            let f = self.factor(&mut used_odd)?;
            value = self.alg.mul(&value, &f);
            if let Some(Tok::Star) = self.peek() {
                self.at += 1;
            } else {
                return Ok(value);
            }
        }
    }

    fn factor(&mut self, used_odd: &mut [bool]) -> Result<Element> {
        let pos = self.pos();
        let name = match self.next() {
            Some(Tok::Name(n)) => n,
            _ => {
                self.at -= 1;
                return self.err("expected a generator name");
            }
        };
        let index = self.alg.index_of(&name).ok_or_else(|| Error::UnknownGenerator { name: name.clone(), pos })?;
        let mut exponent = BigInt::one();
        if let Some(Tok::Caret) = self.peek() {
            self.at += 1;
            exponent = self.uint()?;
        }
        let exponent: u32 =
            u32::try_from(&exponent).map_err(|_| Error::Syntax { pos, msg: "exponent too large".into() })?;
        let g = self.alg.generator(index);
        if g.is_odd() && exponent > 0 {
            if exponent > 1 || used_odd[index] {
                return Err(Error::OddPower { name, pos });
            }
            used_odd[index] = true;
        }
        let mut exps = vec![0; self.alg.len()];
        exps[index] = exponent;
        Ok(Element::monomial(super::Monomial::from_exponents(exps), Q::one()))
    }
}

/// Parses `text` into an element of `alg`, applying Koszul signs when odd
/// generators are listed out of declaration order.
pub fn parse_element(text: &str, alg: &Algebra) -> Result<Element> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(Error::Syntax { pos: text.len(), msg: "empty polynomial".into() });
    }
    let mut p = Parser { toks, at: 0, end: text.len(), alg };
    p.polynomial()
}

fn format_coeff(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub(super) fn format_element(alg: &Algebra, e: &Element) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<_> = e.terms().collect();
    terms.sort_by(|(a, _), (b, _)| alg.monomial_degree(a).cmp(&alg.monomial_degree(b)).then_with(|| a.cmp(b)));
    let mut out = String::new();
    for (i, (m, c)) in terms.into_iter().enumerate() {
        let negative = c.is_negative();
        let abs = c.abs();
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let factors: Vec<String> = m
            .exponents()
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0)
            .map(|(j, &x)| {
                let name = &alg.generator(j).name;
                if x == 1 {
                    name.clone()
                } else {
                    format!("{name}^{x}")
                }
            })
            .collect();
        if factors.is_empty() {
            out.push_str(&format_coeff(&abs));
        } else {
            if !abs.is_one() {
                out.push_str(&format_coeff(&abs));
                out.push('*');
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}
