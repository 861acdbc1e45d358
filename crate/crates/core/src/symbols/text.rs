//! Text form of symbols: `2.5*z1^3*zbar2^1 - (0.5+1.0i)*z2^1 + 1.0`.
//!
//! One-variable symbols use `z` and `zbar`; several variables use `z1..zn`
//! and `zbar1..zbarn`. Coefficients are real literals, imaginary literals
//! (`2.0i`) or parenthesised complex literals (`(1.0-0.5i)`).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::C64;

use super::LaurentPoly;

/// One parsed monomial `c · Π z_j^{a_j} · Π zbar_j^{b_j}` (1-based `j`).
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTerm {
    pub coeff: C64,
    pub z: BTreeMap<usize, u32>,
    pub zbar: BTreeMap<usize, u32>,
}

/// Parsed symbol keeping holomorphic and antiholomorphic exponents apart.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPoly {
    pub terms: Vec<ParsedTerm>,
    /// Largest variable index used (1 for the unnumbered `z`/`zbar`).
    pub nvars: usize,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    unnumbered: Option<bool>,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < bytes.len() && (bytes[self.pos] == b'+' || bytes[self.pos] == b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == digits {
                self.pos = save;
            }
        }
        if self.pos == start {
            return self.err("expected a number");
        }
        let lit = &self.src[start..self.pos];
        lit.parse::<f64>().or_else(|_| {
            self.pos = start;
            self.err(format!("bad number literal {lit:?}"))
        })
    }

    fn uint(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        self.src[start..self.pos]
            .parse()
            .or_else(|_| self.err("integer out of range"))
    }

    /// `(re)`, `(re±imi)`, `(imi)` after the opening parenthesis.
    fn paren_complex(&mut self) -> Result<C64> {
        let sign = if self.eat('-') {
            -1.0
        } else {
            self.eat('+');
            1.0
        };
        let a = sign * self.number()?;
        let value = if self.eat('i') {
            C64::new(0.0, a)
        } else if self.eat('+') {
            let b = self.number()?;
            if !self.eat('i') {
                return self.err("expected `i` after imaginary part");
            }
            C64::new(a, b)
        } else if self.eat('-') {
            let b = self.number()?;
            if !self.eat('i') {
                return self.err("expected `i` after imaginary part");
            }
            C64::new(a, -b)
        } else {
            C64::new(a, 0.0)
        };
        if !self.eat(')') {
            return self.err("expected `)`");
        }
        Ok(value)
    }

    fn variable(&mut self, term: &mut ParsedTerm) -> Result<()> {
        // caller has seen `z`
        self.pos += 1;
        let conj = self.src[self.pos..].starts_with("bar");
        if conj {
            self.pos += 3;
        }
        let numbered = self.peek().is_some_and(|c| c.is_ascii_digit());
        let index = if numbered {
            let k = self.uint()? as usize;
            if k == 0 {
                return self.err("variables are numbered from 1");
            }
            k
        } else {
            1
        };
        match self.unnumbered {
            Some(u) if u == numbered => {
                return self.err("cannot mix `z`/`zbar` with numbered variables");
            }
            _ => self.unnumbered = Some(!numbered),
        }
        let power = if self.eat('^') { self.uint()? } else { 1 };
        let slot = if conj { &mut term.zbar } else { &mut term.z };
        *slot.entry(index).or_insert(0) += power;
        Ok(())
    }

    fn factor(&mut self, term: &mut ParsedTerm) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some('z') => self.variable(term),
            Some('(') => {
                self.pos += 1;
                term.coeff *= self.paren_complex()?;
                Ok(())
            }
            Some('i') => {
                self.pos += 1;
                term.coeff *= C64::new(0.0, 1.0);
                Ok(())
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let x = self.number()?;
                if self.peek() == Some('i') {
                    self.pos += 1;
                    term.coeff *= C64::new(0.0, x);
                } else {
                    term.coeff *= x;
                }
                Ok(())
            }
            Some(c) => self.err(format!("unexpected character {c:?}")),
            None => self.err("unexpected end of input"),
        }
    }

    fn term(&mut self, sign: f64) -> Result<ParsedTerm> {
        let mut term = ParsedTerm {
            coeff: C64::new(sign, 0.0),
            z: BTreeMap::new(),
            zbar: BTreeMap::new(),
        };
        self.factor(&mut term)?;
        while self.eat('*') {
            self.factor(&mut term)?;
        }
        Ok(term)
    }
}

impl ParsedPoly {
    pub fn parse(src: &str) -> Result<Self> {
        let mut lx = Lexer {
            src,
            pos: 0,
            unnumbered: None,
        };
        let mut terms = Vec::new();
        let mut sign = if lx.eat('-') {
            -1.0
        } else {
            lx.eat('+');
            1.0
        };
        loop {
            terms.push(lx.term(sign)?);
            lx.skip_ws();
            if lx.pos == src.len() {
                break;
            }
            sign = if lx.eat('+') {
                1.0
            } else if lx.eat('-') {
                -1.0
            } else {
                return lx.err("expected `+` or `-` between terms");
            };
        }
        let nvars = terms
            .iter()
            .flat_map(|t| t.z.keys().chain(t.zbar.keys()))
            .copied()
            .max()
            .unwrap_or(1);
        Ok(ParsedPoly { terms, nvars })
    }

    /// Torus reading: `zbar_j = z_j^{-1}`.
    pub fn to_laurent(&self, nvars: Option<usize>) -> Result<LaurentPoly> {
        let n = nvars.unwrap_or(self.nvars);
        if n < self.nvars {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("symbol uses {} variables, {} requested", self.nvars, n),
            });
        }
        let terms = self.terms.iter().map(|t| {
            let mut e = vec![0i32; n];
            for (&j, &a) in &t.z {
                e[j - 1] += a as i32;
            }
            for (&j, &b) in &t.zbar {
                e[j - 1] -= b as i32;
            }
            (e, t.coeff)
        });
        LaurentPoly::from_terms(n, terms)
    }
}

fn real_lit(x: f64) -> String {
    format!("{x:?}")
}

fn coeff_lit(c: C64) -> String {
    // adding 0.0 turns a negative zero into 0.0
    let c = C64::new(c.re + 0.0, c.im + 0.0);
    if c.im == 0.0 {
        real_lit(c.re)
    } else if c.im < 0.0 {
        format!("({}-{}i)", real_lit(c.re), real_lit(-c.im))
    } else {
        format!("({}+{}i)", real_lit(c.re), real_lit(c.im))
    }
}

pub(super) fn print(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0.0".into();
    }
    let mut out = String::new();
    for (idx, (e, c)) in p.terms().enumerate() {
        let negative_real = c.im == 0.0 && c.re < 0.0;
        let shown = if negative_real { -c } else { c };
        match (idx, negative_real) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&coeff_lit(shown));
        for (j, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let name = if k > 0 { "z" } else { "zbar" };
            out.push('*');
            out.push_str(name);
            if p.nvars() > 1 {
                out.push_str(&(j + 1).to_string());
            }
            out.push('^');
            out.push_str(&k.unsigned_abs().to_string());
        }
    }
    out
}
