//! Recursive-descent parser for nc expressions.
//!
//! ```text
//! slots   := expr (';' expr)*
//! expr    := ('+'|'-')? term (('+'|'-') term)*
//! term    := factor ('*' factor)*
//! factor  := base ('^' uint)?
//! base    := 'x' uint | 'h' uint | number | number 'i' | '(' expr ')'
//! ```
//!
//! `(a+bi)` needs no special rule: it parses as the sum of two constants.
//! h-variables are only accepted when the caller asks for a demilinear parse;
//! they are encoded as letters `g+1..=2g`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::Word;
use crate::error::{Error, Result};

pub(crate) type RawPoly = BTreeMap<Word, Complex64>;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num { value: f64, imag: bool, uint: Option<u64> },
    X(u64),
    H(u64),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Semi,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let err = |pos: usize, msg: String| Error::Parse { pos, msg };
    while i < chars.len() {
        let (pos, ch) = chars[i];
        match ch {
            c if c.is_whitespace() => i += 1,
            '+' | '-' | '*' | '^' | '(' | ')' | ';' => {
                toks.push((
                    match ch {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '^' => Tok::Caret,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        _ => Tok::Semi,
                    },
                    pos,
                ));
                i += 1;
            }
            'x' | 'h' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(err(pos, format!("expected a variable index after '{ch}'")));
                }
                let digits: String = chars[i + 1..j].iter().map(|c| c.1).collect();
                let index: u64 = digits
                    .parse()
                    .map_err(|_| err(pos, format!("variable index '{digits}' is too large")))?;
                toks.push((if ch == 'x' { Tok::X(index) } else { Tok::H(index) }, pos));
                i = j;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                let mut plain = true;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                if j < chars.len() && chars[j].1 == '.' {
                    plain = false;
                    j += 1;
                    while j < chars.len() && chars[j].1.is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < chars.len() && (chars[j].1 == 'e' || chars[j].1 == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k].1 == '+' || chars[k].1 == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].1.is_ascii_digit() {
                        plain = false;
                        while k < chars.len() && chars[k].1.is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text: String = chars[i..j].iter().map(|c| c.1).collect();
                let value: f64 = text
                    .parse()
                    .map_err(|_| err(pos, format!("malformed number '{text}'")))?;
                let imag = j < chars.len() && chars[j].1 == 'i';
                if imag {
                    j += 1;
                }
                let uint = if plain && !imag { text.parse().ok() } else { None };
                toks.push((Tok::Num { value, imag, uint }, pos));
                i = j;
            }
            other => return Err(err(pos, format!("unexpected character '{other}'"))),
        }
    }
    toks.push((Tok::End, src.len()));
    Ok(toks)
}

pub(crate) struct ParseOptions {
    pub g: usize,
    pub allow_h: bool,
    pub degree_cap: usize,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    opts: ParseOptions,
}

fn constant(c: Complex64) -> RawPoly {
    let mut p = RawPoly::new();
    if c != Complex64::new(0.0, 0.0) {
        p.insert(Word::empty(), c);
    }
    p
}

pub(crate) fn degree(p: &RawPoly) -> usize {
    p.keys().map(Word::len).max().unwrap_or(0)
}

pub(crate) fn add_into(acc: &mut RawPoly, w: Word, c: Complex64) {
    use std::collections::btree_map::Entry;
    match acc.entry(w) {
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if *e.get() == Complex64::new(0.0, 0.0) {
                e.remove();
            }
        }
        Entry::Vacant(e) => {
            if c != Complex64::new(0.0, 0.0) {
                e.insert(c);
            }
        }
    }
}

pub(crate) fn mul_raw(a: &RawPoly, b: &RawPoly) -> RawPoly {
    let mut out = RawPoly::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            add_into(&mut out, wa.concat(wb), ca * cb);
        }
    }
    out
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn check_cap(&self, degree: usize) -> Result<()> {
        if degree > self.opts.degree_cap {
            return Err(Error::DegreeCap {
                degree,
                cap: self.opts.degree_cap,
            });
        }
        Ok(())
    }

    fn slots(&mut self) -> Result<Vec<RawPoly>> {
        let mut out = vec![self.expr()?];
        loop {
            match self.peek() {
                Tok::Semi => {
                    self.bump();
                    out.push(self.expr()?);
                }
                Tok::End => return Ok(out),
                _ => return self.fail("expected an operator, ';' or end of input"),
            }
        }
    }

    fn expr(&mut self) -> Result<RawPoly> {
        let mut sign = Complex64::new(1.0, 0.0);
        match self.peek() {
            Tok::Plus => {
                self.bump();
            }
            Tok::Minus => {
                self.bump();
                sign = -sign;
            }
            _ => {}
        }
        let mut acc = RawPoly::new();
        for (w, c) in self.term()? {
            add_into(&mut acc, w, c * sign);
        }
        loop {
            let sign = match self.peek() {
                Tok::Plus => Complex64::new(1.0, 0.0),
                Tok::Minus => Complex64::new(-1.0, 0.0),
                _ => return Ok(acc),
            };
            self.bump();
            for (w, c) in self.term()? {
                add_into(&mut acc, w, c * sign);
            }
        }
    }

    fn term(&mut self) -> Result<RawPoly> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.factor()?;
            self.check_cap(degree(&acc) + degree(&rhs))?;
            acc = mul_raw(&acc, &rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<RawPoly> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp = match self.peek() {
            Tok::Num { uint: Some(k), .. } => *k,
            _ => return self.fail("expected a non-negative integer exponent"),
        };
        self.bump();
        let d = degree(&base);
        if d == 0 {
            let c = base.get(&Word::empty()).copied().unwrap_or_default();
            let k = match i32::try_from(exp) {
                Ok(k) => k,
                Err(_) => return self.fail("exponent is too large"),
            };
            return Ok(constant(c.powi(k)));
        }
        let total = (d as u64).saturating_mul(exp);
        if total > self.opts.degree_cap as u64 {
            return Err(Error::DegreeCap {
                degree: usize::try_from(total).unwrap_or(usize::MAX),
                cap: self.opts.degree_cap,
            });
        }
        let mut acc = constant(Complex64::new(1.0, 0.0));
        for _ in 0..exp {
            acc = mul_raw(&acc, &base);
        }
        Ok(acc)
    }

    fn variable(&mut self, index: u64, is_h: bool) -> Result<RawPoly> {
        let g = self.opts.g as u64;
        let name = if is_h { 'h' } else { 'x' };
        if index == 0 || index > g {
            return self.fail(format!("variable {name}{index} out of range {name}1..{name}{g}"));
        }
        if is_h && !self.opts.allow_h {
            return self.fail(format!(
                "h{index} is only allowed in demilinear expressions"
            ));
        }
        self.bump();
        let letter = if is_h { index + g } else { index } as u32;
        let mut p = RawPoly::new();
        p.insert(Word::new(vec![letter]), Complex64::new(1.0, 0.0));
        self.check_cap(1)?;
        Ok(p)
    }

    fn base(&mut self) -> Result<RawPoly> {
        match self.peek().clone() {
            Tok::X(i) => self.variable(i, false),
            Tok::H(i) => self.variable(i, true),
            Tok::Num { value, imag, .. } => {
                self.bump();
                let c = if imag {
                    Complex64::new(0.0, value)
                } else {
                    Complex64::new(value, 0.0)
                };
                Ok(constant(c))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.fail("expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => self.fail("unexpected end of input"),
            _ => self.fail("expected a variable, number or '('"),
        }
    }
}

/// Parses `text` into one raw polynomial per `;`-separated slot.
pub(crate) fn parse_slots(text: &str, opts: ParseOptions) -> Result<Vec<RawPoly>> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, opts };
    p.slots()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(g: usize) -> ParseOptions {
        ParseOptions {
            g,
            allow_h: false,
            degree_cap: 12,
        }
    }

    #[test]
    fn reports_error_positions() {
        match parse_slots("x1 + * x2", opts(2)) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse_slots("x1 + x3", opts(2)) {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(pos, 5);
                assert!(msg.contains("out of range"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_slots("(x1", opts(1)), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_slots("x1 $", opts(1)), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse_slots("x1^1.5", opts(1)), Err(Error::Parse { .. })));
        assert!(matches!(parse_slots("h1", opts(1)), Err(Error::Parse { pos: 0, .. })));
    }

    #[test]
    fn enforces_degree_cap() {
        assert!(matches!(
            parse_slots("x1^13", opts(1)),
            Err(Error::DegreeCap { degree: 13, cap: 12 })
        ));
        assert!(matches!(
            parse_slots("(x1+x2)^100000000000", opts(2)),
            Err(Error::DegreeCap { .. })
        ));
        assert!(parse_slots("x1^12", opts(1)).is_ok());
    }

    #[test]
    fn numbers_and_constants() {
        let p = parse_slots("2^3 + 1.5e1i + .5", opts(1)).unwrap();
        assert_eq!(p[0][&Word::empty()], Complex64::new(8.5, 15.0));
        let q = parse_slots("x1^0", opts(1)).unwrap();
        assert_eq!(q[0][&Word::empty()], Complex64::new(1.0, 0.0));
    }
}
