//! Free noncommutative polynomials.

mod parse;
mod print;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::demilinear::DemiPoly;
use crate::error::{Error, Result};
use crate::matcore::{CMatrix, MatrixTuple};

pub(crate) use parse::{parse_slots, ParseOptions, RawPoly};
pub use print::render_coefficient;
pub(crate) use print::{render_letters, render_sum};

/// Degree limit applied while parsing.
pub const DEFAULT_DEGREE_CAP: usize = 12;

/// A monomial `x_{w1} ⋯ x_{wk}`; letters are 1-based. The empty word is 1.
///
/// Words order by length first, then lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(letters: Vec<u32>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `self · x_letter · right`.
    pub fn splice(&self, letter: u32, right: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1 + right.len());
        v.extend_from_slice(&self.0);
        v.push(letter);
        v.extend_from_slice(&right.0);
        Word(v)
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word(self.0[..k].to_vec())
    }

    pub fn suffix_after(&self, k: usize) -> Word {
        Word(self.0[k + 1..].to_vec())
    }

    pub fn validate(&self, g: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l == 0 || l as usize > g) {
            Some(&l) => Err(Error::Config(format!(
                "letter {l} is outside 1..{g}"
            ))),
            None => Ok(()),
        }
    }

    /// `X_{w1} ⋯ X_{wk}`, or the identity for the empty word.
    pub fn eval(&self, x: &MatrixTuple) -> CMatrix {
        let mut it = self.0.iter();
        match it.next() {
            None => CMatrix::identity(x.level()),
            Some(&first) => {
                let mut acc = x.component(first as usize - 1).clone();
                for &l in it {
                    acc = acc.matmul(x.component(l as usize - 1));
                }
                acc
            }
        }
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&render_letters(&self.0, u32::MAX as usize))
        }
    }
}

/// An `h`-tuple of polynomials in `g` free variables.
#[derive(Clone, Debug, PartialEq)]
pub struct NcPoly {
    g: usize,
    slots: Vec<BTreeMap<Word, Complex64>>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl NcPoly {
    pub fn zero(g: usize, h: usize) -> Self {
        Self {
            g,
            slots: vec![BTreeMap::new(); h.max(1)],
        }
    }

    pub fn constant(g: usize, c: Complex64) -> Self {
        let mut p = Self::zero(g, 1);
        p.add_term(0, Word::empty(), c);
        p
    }

    /// The coordinate polynomial `x_i` (1-based).
    pub fn var(g: usize, i: usize) -> Result<Self> {
        let w = Word::new(vec![i as u32]);
        w.validate(g)?;
        let mut p = Self::zero(g, 1);
        p.add_term(0, w, Complex64::new(1.0, 0.0));
        Ok(p)
    }

    /// Builds a polynomial from `(slot, word, coeff)` terms, merging repeats.
    pub fn from_terms(
        g: usize,
        h: usize,
        terms: impl IntoIterator<Item = (usize, Word, Complex64)>,
    ) -> Result<Self> {
        let mut p = Self::zero(g, h);
        for (slot, w, c) in terms {
            if slot >= p.h() {
                return Err(Error::ArityMismatch {
                    expected: p.h(),
                    found: slot + 1,
                });
            }
            w.validate(g)?;
            if !c.is_finite() {
                return Err(Error::Config(format!("coefficient of {w} is not finite")));
            }
            p.add_term(slot, w, c);
        }
        Ok(p)
    }

    pub(crate) fn from_raw(g: usize, slots: Vec<RawPoly>) -> Self {
        Self { g, slots }
    }

    /// Parses with the default degree cap.
    pub fn parse(text: &str, g: usize, h: usize) -> Result<Self> {
        Self::parse_with_cap(text, g, h, DEFAULT_DEGREE_CAP)
    }

    /// Parses `;`-separated output slots; `h` slots are required.
    pub fn parse_with_cap(text: &str, g: usize, h: usize, degree_cap: usize) -> Result<Self> {
        let slots = parse_slots(
            text,
            ParseOptions {
                g,
                allow_h: false,
                degree_cap,
            },
        )?;
        if slots.len() != h {
            return Err(Error::ArityMismatch {
                expected: h,
                found: slots.len(),
            });
        }
        Ok(Self::from_raw(g, slots))
    }

    pub(crate) fn add_term(&mut self, slot: usize, w: Word, c: Complex64) {
        parse::add_into(&mut self.slots[slot], w, c);
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn h(&self) -> usize {
        self.slots.len()
    }

    pub fn slot(&self, k: usize) -> &BTreeMap<Word, Complex64> {
        &self.slots[k]
    }

    pub fn slots(&self) -> &[BTreeMap<Word, Complex64>] {
        &self.slots
    }

    pub fn coeff(&self, slot: usize, w: &Word) -> Complex64 {
        self.slots[slot].get(w).copied().unwrap_or_else(zero)
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(BTreeMap::is_empty)
    }

    pub fn degree(&self) -> usize {
        self.slots.iter().map(parse::degree).max().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.slots.iter().map(BTreeMap::len).sum()
    }

    /// Copy with every constant term removed.
    pub fn without_constant(&self) -> Self {
        let mut p = self.clone();
        for s in &mut p.slots {
            s.remove(&Word::empty());
        }
        p
    }

    fn check_shape(&self, other: &NcPoly) -> Result<()> {
        if self.g != other.g {
            return Err(Error::ArityMismatch {
                expected: self.g,
                found: other.g,
            });
        }
        if self.h() != other.h() {
            return Err(Error::ArityMismatch {
                expected: self.h(),
                found: other.h(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &NcPoly) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (k, s) in other.slots.iter().enumerate() {
            for (w, &c) in s {
                out.add_term(k, w.clone(), c);
            }
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &NcPoly) -> Result<Self> {
        self.checked_add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Noncommutative product; defined for scalar-valued (h = 1) polynomials.
    pub fn checked_mul(&self, other: &NcPoly) -> Result<Self> {
        self.check_shape(other)?;
        if self.h() != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                found: self.h(),
            });
        }
        Ok(Self::from_raw(
            self.g,
            vec![parse::mul_raw(&self.slots[0], &other.slots[0])],
        ))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.g, self.h());
        for (k, s) in self.slots.iter().enumerate() {
            for (w, &a) in s {
                out.add_term(k, w.clone(), a * c);
            }
        }
        out
    }

    /// Evaluates every slot at `x`.
    pub fn eval(&self, x: &MatrixTuple) -> Result<MatrixTuple> {
        if x.g() != self.g {
            return Err(Error::ArityMismatch {
                expected: self.g,
                found: x.g(),
            });
        }
        let n = x.level();
        let comps = self
            .slots
            .iter()
            .map(|s| {
                let mut acc = CMatrix::zeros(n);
                for (w, &c) in s {
                    acc.add_scaled(c, &w.eval(x));
                }
                acc
            })
            .collect();
        MatrixTuple::new(comps)
    }

    /// Leibniz rule on words: `D(w)(X)[H] = Σ_j X_{w<j} H_{w_j} X_{w>j}`.
    pub fn formal_derivative(&self) -> DemiPoly {
        let mut d = DemiPoly::zero(self.g, self.h());
        for (k, s) in self.slots.iter().enumerate() {
            for (w, &c) in s {
                for (j, &l) in w.letters().iter().enumerate() {
                    d.add_raw(k, w.prefix(j), l, w.suffix_after(j), c);
                }
            }
        }
        d
    }

    /// Random polynomial with up to `terms` monomials per slot of degree at
    /// most `max_degree` and Gaussian complex coefficients.
    pub fn random<R: Rng + ?Sized>(
        g: usize,
        h: usize,
        max_degree: usize,
        terms: usize,
        rng: &mut R,
    ) -> Self {
        let mut p = Self::zero(g, h);
        for k in 0..p.h() {
            for _ in 0..terms {
                let len = rng.random_range(0..=max_degree);
                let letters = (0..len).map(|_| rng.random_range(1..=g as u32)).collect();
                let c = crate::matcore::random::complex_gaussian(rng);
                p.add_term(k, Word::new(letters), c);
            }
        }
        p
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .slots
            .iter()
            .map(|s| {
                let bodies: Vec<(Complex64, String)> = s
                    .iter()
                    .map(|(w, &c)| (c, render_letters(w.letters(), self.g)))
                    .collect();
                render_sum(bodies.iter().map(|(c, b)| (*c, b.as_str())))
            })
            .collect();
        f.write_str(&parts.join("; "))
    }
}
