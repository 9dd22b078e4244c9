use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::beta::BetaEngine;
use crate::error::{Error, Result};
use crate::matcore::{CMatrix, MatrixTuple};

/// Scalars read off `β_{m+n}(X⊕Y) − β_m(X)⊕β_n(Y) ≈ c^m·I_m ⊕ c^n·I_n`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairConstant {
    pub m: usize,
    pub n: usize,
    /// `c^m_{m+n}`, one scalar per output slot.
    #[serde(serialize_with = "crate::matcore::serialize_complex_vec")]
    pub c_m: Vec<Complex64>,
    /// `c^n_{m+n}`.
    #[serde(serialize_with = "crate::matcore::serialize_complex_vec")]
    pub c_n: Vec<Complex64>,
    /// Frobenius distance of the difference from scalar-block form.
    pub structure_residual: f64,
    /// Largest change of the scalars between the two probe pairs.
    pub probe_discrepancy: f64,
    pub tolerance: f64,
}

fn block_scalar(m: &CMatrix, start: usize, size: usize) -> (Complex64, f64) {
    let b = m.block(start, start, size, size).to_square().expect("square block");
    let s = b.trace() / size as f64;
    (s, b.dist(&CMatrix::scalar(size, s)))
}

/// Splits `d` into scalar blocks of sizes `m` and `n`, returning the scalars
/// and the squared distance from that form.
fn scalar_blocks(d: &MatrixTuple, m: usize, n: usize) -> (Vec<Complex64>, Vec<Complex64>, f64) {
    let mut cm = Vec::with_capacity(d.g());
    let mut cn = Vec::with_capacity(d.g());
    let mut sq = 0.0;
    for c in d.components() {
        let (a, ra) = block_scalar(c, 0, m);
        let (b, rb) = block_scalar(c, m, n);
        let off = c.block(0, m, m, n).frobenius_norm().powi(2)
            + c.block(m, 0, n, m).frobenius_norm().powi(2);
        cm.push(a);
        cn.push(b);
        sq += ra * ra + rb * rb + off;
    }
    (cm, cn, sq)
}

fn max_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Computes `c^m_{m+n}` and `c^n_{m+n}` from two random probe pairs. Aborts
/// with [`Error::ConstantExtraction`] when either the structure residual or
/// the probe discrepancy exceeds the tolerance model.
pub fn pair_constants<R: Rng + ?Sized>(
    engine: &BetaEngine,
    m: usize,
    n: usize,
    rng: &mut R,
) -> Result<PairConstant> {
    let domain = engine.domain();
    let mut probes = Vec::with_capacity(2);
    let mut structure: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for _ in 0..2 {
        let x = domain.sample_point(m, rng)?;
        let y = domain.sample_point(n, rng)?;
        let xy = x.direct_sum(&y)?;
        domain.check(&xy)?;
        let whole = engine.beta(&xy)?;
        let parts = engine.beta(&x)?.direct_sum(&engine.beta(&y)?)?;
        let (cm, cn, sq) = scalar_blocks(&(&whole - &parts), m, n);
        structure = structure.max(sq.sqrt());
        scale = scale.max(1.0 + whole.frobenius_norm());
        probes.push((cm, cn));
    }
    let discrepancy = max_gap(&probes[0].0, &probes[1].0).max(max_gap(&probes[0].1, &probes[1].1));
    let tolerance = engine.config().tolerance() * scale;
    let worst = structure.max(discrepancy);
    if worst > tolerance {
        return Err(Error::ConstantExtraction {
            m,
            n,
            residual: worst,
            tolerance,
        });
    }
    let (c_m, c_n) = probes.swap_remove(0);
    Ok(PairConstant {
        m,
        n,
        c_m,
        c_n,
        structure_residual: structure,
        probe_discrepancy: discrepancy,
        tolerance,
    })
}

/// Every pair constant computed so far, keyed by `(k, total)` for `c^k_{total}`.
#[derive(Clone, Debug, Default)]
pub struct ConstantStore {
    entries: BTreeMap<(usize, usize), (Vec<Complex64>, f64)>,
    pairs: Vec<PairConstant>,
}

impl ConstantStore {
    pub fn insert(&mut self, p: PairConstant) {
        let total = p.m + p.n;
        self.entries
            .entry((p.m, total))
            .or_insert_with(|| (p.c_m.clone(), p.tolerance));
        self.entries
            .entry((p.n, total))
            .or_insert_with(|| (p.c_n.clone(), p.tolerance));
        self.pairs.push(p);
    }

    /// `c^k_{total}`, computing the pair `(k, total − k)` if needed.
    pub fn get<R: Rng + ?Sized>(
        &mut self,
        engine: &BetaEngine,
        k: usize,
        total: usize,
        rng: &mut R,
    ) -> Result<(Vec<Complex64>, f64)> {
        if let Some(v) = self.entries.get(&(k, total)) {
            return Ok(v.clone());
        }
        if k == 0 || k >= total {
            return Err(Error::Config(format!("no pair constant c^{k}_{total}")));
        }
        self.insert(pair_constants(engine, k, total - k, rng)?);
        Ok(self.entries[&(k, total)].clone())
    }

    pub fn pairs(&self) -> &[PairConstant] {
        &self.pairs
    }

    pub fn into_pairs(self) -> Vec<PairConstant> {
        self.pairs
    }
}

/// One instance of `c^k_{k+m+n} = c^{k+m}_{k+m+n} + c^k_{k+m}`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TripleCheck {
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub holds: bool,
}

pub fn triple_consistency<R: Rng + ?Sized>(
    engine: &BetaEngine,
    store: &mut ConstantStore,
    (k, m, n): (usize, usize, usize),
    rng: &mut R,
) -> Result<TripleCheck> {
    let total = k + m + n;
    for level in [k + m, total] {
        if !engine.domain().has_level(level) {
            return Err(Error::EmptyDomain(vec![level]));
        }
    }
    let (lhs, t1) = store.get(engine, k, total, rng)?;
    let (a, t2) = store.get(engine, k + m, total, rng)?;
    let (b, t3) = store.get(engine, k, k + m, rng)?;
    let rhs: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let residual = max_gap(&lhs, &rhs);
    let tolerance = t1 + t2 + t3;
    Ok(TripleCheck {
        k,
        m,
        n,
        residual,
        tolerance,
        holds: residual <= tolerance,
    })
}
