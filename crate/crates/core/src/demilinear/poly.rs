use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{CMatrix, MatrixTuple};
use crate::ncpoly::{
    parse_slots, render_coefficient, render_letters, render_sum, NcPoly, ParseOptions, Word,
    DEFAULT_DEGREE_CAP,
};

/// One monomial `coeff · u(X) · H_var · v(X)`; `var` is 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct DemiTerm {
    pub coeff: Complex64,
    pub left: Word,
    pub var: usize,
    pub right: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct TermKey {
    left: Word,
    var: u32,
    right: Word,
}

impl TermKey {
    fn full_word(&self) -> Word {
        self.left.splice(self.var, &self.right)
    }
}

impl Ord for TermKey {
    /// By the word `u·x_i·v`, then by the position of the `H` factor.
    fn cmp(&self, other: &Self) -> Ordering {
        self.full_word()
            .cmp(&other.full_word())
            .then_with(|| self.left.len().cmp(&other.left.len()))
    }
}

impl PartialOrd for TermKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `T(X, H) = Σ c · u(X) · H_i · v(X)`, one term map per output slot.
#[derive(Clone, Debug, PartialEq)]
pub struct DemiPoly {
    g: usize,
    slots: Vec<BTreeMap<TermKey, Complex64>>,
}

/// A decomposition `u · x_i · v` of a witness word with its coefficient in `T`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub term: String,
    pub coeff: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactnessWitness {
    pub slot: usize,
    pub word: String,
    pub decompositions: Vec<Decomposition>,
    #[serde(skip)]
    pub coefficients: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactnessReport {
    pub exact: bool,
    pub potential: Option<NcPoly>,
    pub witness: Option<ExactnessWitness>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl DemiPoly {
    pub fn zero(g: usize, h: usize) -> Self {
        Self {
            g,
            slots: vec![BTreeMap::new(); h.max(1)],
        }
    }

    pub(crate) fn add_raw(&mut self, slot: usize, left: Word, var: u32, right: Word, c: Complex64) {
        use std::collections::btree_map::Entry;
        match self.slots[slot].entry(TermKey { left, var, right }) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if c != zero() {
                    e.insert(c);
                }
            }
        }
    }

    /// Builds from `(slot, term)` pairs, merging equal `(left, var, right)`.
    pub fn from_terms(
        g: usize,
        h: usize,
        terms: impl IntoIterator<Item = (usize, DemiTerm)>,
    ) -> Result<Self> {
        let mut p = Self::zero(g, h);
        for (slot, t) in terms {
            if slot >= p.h() {
                return Err(Error::ArityMismatch {
                    expected: p.h(),
                    found: slot + 1,
                });
            }
            if t.var == 0 || t.var > g {
                return Err(Error::Config(format!("h{} is outside h1..h{g}", t.var)));
            }
            t.left.validate(g)?;
            t.right.validate(g)?;
            if !t.coeff.is_finite() {
                return Err(Error::Config("demilinear coefficients must be finite".into()));
            }
            p.add_raw(slot, t.left, t.var as u32, t.right, t.coeff);
        }
        Ok(p)
    }

    pub fn parse(text: &str, g: usize, h: usize) -> Result<Self> {
        Self::parse_with_cap(text, g, h, DEFAULT_DEGREE_CAP)
    }

    /// Parses an expression whose monomials each contain exactly one `h#`.
    pub fn parse_with_cap(text: &str, g: usize, h: usize, degree_cap: usize) -> Result<Self> {
        let slots = parse_slots(
            text,
            ParseOptions {
                g,
                allow_h: true,
                degree_cap,
            },
        )?;
        if slots.len() != h {
            return Err(Error::ArityMismatch {
                expected: h,
                found: slots.len(),
            });
        }
        let mut p = Self::zero(g, h);
        for (k, raw) in slots.into_iter().enumerate() {
            for (w, c) in raw {
                let hs: Vec<usize> = w
                    .letters()
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l as usize > g)
                    .map(|(j, _)| j)
                    .collect();
                if hs.len() != 1 {
                    let shown = if w.is_empty() {
                        render_coefficient(c)
                    } else {
                        render_letters(w.letters(), g)
                    };
                    return Err(Error::NotDemilinear(format!(
                        "monomial '{shown}' has {} h-variables; each monomial needs exactly one",
                        hs.len()
                    )));
                }
                let j = hs[0];
                let var = w.letters()[j] - g as u32;
                p.add_raw(k, w.prefix(j), var, w.suffix_after(j), c);
            }
        }
        Ok(p)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn h(&self) -> usize {
        self.slots.len()
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(BTreeMap::is_empty)
    }

    pub fn num_terms(&self) -> usize {
        self.slots.iter().map(BTreeMap::len).sum()
    }

    /// Terms of one slot in canonical order.
    pub fn terms(&self, slot: usize) -> impl Iterator<Item = DemiTerm> + '_ {
        self.slots[slot].iter().map(|(k, &c)| DemiTerm {
            coeff: c,
            left: k.left.clone(),
            var: k.var as usize,
            right: k.right.clone(),
        })
    }

    /// Degree in `X` plus one.
    pub fn degree(&self) -> usize {
        self.slots
            .iter()
            .flat_map(|s| s.keys())
            .map(|k| k.left.len() + 1 + k.right.len())
            .max()
            .unwrap_or(0)
    }

    pub fn checked_add(&self, other: &DemiPoly) -> Result<Self> {
        if self.g != other.g || self.h() != other.h() {
            return Err(Error::ArityMismatch {
                expected: self.g,
                found: other.g,
            });
        }
        let mut out = self.clone();
        for (k, s) in other.slots.iter().enumerate() {
            for (key, &c) in s {
                out.add_raw(k, key.left.clone(), key.var, key.right.clone(), c);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, a: Complex64) -> Self {
        let mut out = Self::zero(self.g, self.h());
        for (k, s) in self.slots.iter().enumerate() {
            for (key, &c) in s {
                out.add_raw(k, key.left.clone(), key.var, key.right.clone(), c * a);
            }
        }
        out
    }

    /// `Σ c · u(X) · H_i · v(X)` per slot.
    pub fn eval(&self, x: &MatrixTuple, h: &MatrixTuple) -> Result<MatrixTuple> {
        if x.g() != self.g {
            return Err(Error::ArityMismatch {
                expected: self.g,
                found: x.g(),
            });
        }
        x.check_conforming(h)?;
        let n = x.level();
        let mut cache: HashMap<Word, CMatrix> = HashMap::new();
        let mut word_value = |w: &Word| -> CMatrix {
            cache.entry(w.clone()).or_insert_with(|| w.eval(x)).clone()
        };
        let comps = self
            .slots
            .iter()
            .map(|s| {
                let mut acc = CMatrix::zeros(n);
                for (k, &c) in s {
                    let hv = h.component(k.var as usize - 1);
                    let mut term = if k.left.is_empty() {
                        hv.clone()
                    } else {
                        word_value(&k.left).matmul(hv)
                    };
                    if !k.right.is_empty() {
                        term = term.matmul(&word_value(&k.right));
                    }
                    acc.add_scaled(c, &term);
                }
                acc
            })
            .collect();
        MatrixTuple::new(comps)
    }

    /// Exactness by decomposition: `T = Df` iff, for every word `m`, all
    /// decompositions `m = u·x_i·v` carry the same coefficient, missing
    /// decompositions counting as zero. That common value is `f`'s
    /// coefficient on `m`.
    pub fn antiderivative(&self) -> ExactnessReport {
        let mut potential = NcPoly::zero(self.g, self.h());
        for (k, s) in self.slots.iter().enumerate() {
            let mut words: Vec<Word> = s.keys().map(TermKey::full_word).collect();
            words.dedup();
            for m in words {
                let coeffs: Vec<(String, Complex64)> = (0..m.len())
                    .rev()
                    .map(|j| {
                        let key = TermKey {
                            left: m.prefix(j),
                            var: m.letters()[j],
                            right: m.suffix_after(j),
                        };
                        let c = s.get(&key).copied().unwrap_or_else(zero);
                        (self.render_key(&key), c)
                    })
                    .collect();
                let first = coeffs[0].1;
                if coeffs.iter().any(|(_, c)| *c != first) {
                    return ExactnessReport {
                        exact: false,
                        potential: None,
                        witness: Some(ExactnessWitness {
                            slot: k,
                            word: render_letters(m.letters(), self.g),
                            decompositions: coeffs
                                .iter()
                                .map(|(t, c)| Decomposition {
                                    term: t.clone(),
                                    coeff: [c.re, c.im],
                                })
                                .collect(),
                            coefficients: coeffs.iter().map(|(_, c)| *c).collect(),
                        }),
                    };
                }
                potential.add_term(k, m, first);
            }
        }
        ExactnessReport {
            exact: true,
            potential: Some(potential),
            witness: None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.antiderivative().exact
    }

    fn render_key(&self, k: &TermKey) -> String {
        let letters = k.left.splice(self.g as u32 + k.var, &k.right);
        render_letters(letters.letters(), self.g)
    }

    /// Random demilinear polynomial; terms have total degree at most
    /// `max_degree` (counting the `H` factor).
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
                let len = rng.random_range(0..max_degree.max(1));
                let split = rng.random_range(0..=len);
                let left = Word::new((0..split).map(|_| rng.random_range(1..=g as u32)).collect());
                let right =
                    Word::new((split..len).map(|_| rng.random_range(1..=g as u32)).collect());
                let var = rng.random_range(1..=g as u32);
                let c = crate::matcore::random::complex_gaussian(rng);
                p.add_raw(k, left, var, right, c);
            }
        }
        p
    }
}

impl fmt::Display for DemiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .slots
            .iter()
            .map(|s| {
                let bodies: Vec<(Complex64, String)> =
                    s.iter().map(|(k, &c)| (c, self.render_key(k))).collect();
                render_sum(bodies.iter().map(|(c, b)| (*c, b.as_str())))
            })
            .collect();
        f.write_str(&parts.join("; "))
    }
}
