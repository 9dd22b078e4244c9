use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::beta::{BetaEngine, PotentialConfig};
use super::constants::{ConstantStore, PairConstant};
use crate::demilinear::DemilinearMap;
use crate::domain::FreeDomain;
use crate::error::{Error, Result};
use crate::freecalc::{FreeFn, FreeMap, DEFAULT_LADDER, SIMILARITY_COND_LIMIT};
use crate::matcore::random::{haar_unitary, random_direction, upper_unipotent};
use crate::matcore::{MatrixTuple, Similarity};
use crate::rng::SeedStream;

/// Pair constants and the level constants `b_k` derived from them.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConstantsTable {
    /// Smallest level of the domain.
    pub n0: usize,
    pub pairs: Vec<PairConstant>,
    #[serde(serialize_with = "serialize_levels")]
    pub level_constants: BTreeMap<usize, Vec<Complex64>>,
    pub notes: Vec<String>,
}

fn serialize_levels<S: serde::Serializer>(
    m: &BTreeMap<usize, Vec<Complex64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| {
        (k.to_string(), v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
    }))
}

/// `f̂_k = β_k + b_k·I` on the covered levels.
pub struct PotentialFunction {
    engine: Arc<BetaEngine>,
    constants: ConstantsTable,
    levels: Vec<usize>,
}

/// Builds `f̂` for a demilinear `T` on the requested levels of `domain`.
///
/// With `n₀ = min 𝒩`, `b_{n₀} = 0` and `b_k = c^k_{k+n₀} − c^{n₀}_{k+n₀}`.
/// Levels `k` with `k + n₀ ∉ 𝒩` keep `b_k = 0`; the table notes each one.
pub fn build_potential(
    t: &DemilinearMap,
    domain: &FreeDomain,
    cover: &[usize],
    config: PotentialConfig,
) -> Result<PotentialFunction> {
    let levels = domain.tested_levels(cover)?;
    let engine = Arc::new(BetaEngine::new(t.clone(), domain.clone(), config)?);
    for &k in &levels {
        engine.anchor(k)?;
    }
    let n0 = domain.levels().min().ok_or_else(|| Error::EmptyDomain(cover.to_vec()))?;
    let mut store = ConstantStore::default();
    let mut level_constants = BTreeMap::new();
    let mut notes = Vec::new();
    let zero = vec![Complex64::new(0.0, 0.0); t.h()];
    let pairs_stream = SeedStream::new(config.seed).labeled("pairs");
    for &k in &levels {
        let b = if k == n0 {
            zero.clone()
        } else if domain.has_level(k + n0) {
            let mut rng = pairs_stream.substream(k as u64).rng();
            let (ck, _) = store.get(&engine, k, k + n0, &mut rng)?;
            let (cn0, _) = store.get(&engine, n0, k + n0, &mut rng)?;
            ck.iter().zip(&cn0).map(|(a, b)| a - b).collect()
        } else {
            notes.push(format!(
                "level {k}: level {} is outside the domain, so b_{k} = 0",
                k + n0
            ));
            zero.clone()
        };
        level_constants.insert(k, b);
    }
    if levels.len() == 1 && levels[0] == n0 {
        notes.push(format!("only level {n0} is covered; constant fixing is trivial"));
    }
    Ok(PotentialFunction {
        engine,
        constants: ConstantsTable {
            n0,
            pairs: store.into_pairs(),
            level_constants,
            notes,
        },
        levels,
    })
}

impl PotentialFunction {
    pub fn engine(&self) -> &BetaEngine {
        &self.engine
    }

    pub fn constants(&self) -> &ConstantsTable {
        &self.constants
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn domain(&self) -> &FreeDomain {
        self.engine.domain()
    }

    pub fn eval(&self, x: &MatrixTuple) -> Result<MatrixTuple> {
        let k = x.level();
        let b = self.constants.level_constants.get(&k).ok_or_else(|| {
            Error::Config(format!(
                "level {k} is not covered by this potential (covered: {:?})",
                self.levels
            ))
        })?;
        self.domain().check(x)?;
        Ok(&self.engine.beta(x)? + &MatrixTuple::scalars(k, b))
    }

    /// `f̂` as a black-box free map, for the derivative engines.
    pub fn as_free_map(self: &Arc<Self>) -> FreeMap {
        let me = Arc::clone(self);
        let f: Arc<FreeFn> = Arc::new(move |x| me.eval(x));
        FreeMap::black_box(self.engine.map().g(), self.engine.map().h(), f)
    }

    /// Compares against a known potential `f`: per level, `f̂ − f` should be
    /// one scalar multiple of the identity per slot.
    pub fn offset_against<R: Rng + ?Sized>(
        &self,
        f: &FreeMap,
        samples: usize,
        rng: &mut R,
    ) -> Result<OffsetReport> {
        let mut offsets: BTreeMap<usize, Vec<Vec<Complex64>>> = BTreeMap::new();
        let mut non_scalar: f64 = 0.0;
        for &k in &self.levels {
            for _ in 0..samples {
                let x = self.domain().sample_point(k, rng)?;
                let d = &self.eval(&x)? - &f.eval(&x)?;
                let s: Vec<Complex64> = d.components().iter().map(|c| c.trace() / k as f64).collect();
                non_scalar = non_scalar.max(d.dist(&MatrixTuple::scalars(k, &s)));
                offsets.entry(k).or_default().push(s);
            }
        }
        let reference = offsets
            .values()
            .next()
            .and_then(|v| v.first())
            .cloned()
            .unwrap_or_default();
        let spread = offsets
            .values()
            .flatten()
            .flat_map(|s| s.iter().zip(&reference).map(|(a, b)| (a - b).norm()))
            .fold(0.0, f64::max);
        Ok(OffsetReport {
            offset: reference,
            non_scalar_residual: non_scalar,
            spread,
            levels: self.levels.clone(),
            samples,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OffsetReport {
    #[serde(serialize_with = "crate::matcore::serialize_complex_vec")]
    pub offset: Vec<Complex64>,
    /// Largest `‖(f̂ − f)(X) − s·I‖_F` with `s` the per-slot trace average.
    pub non_scalar_residual: f64,
    /// Largest deviation of any sampled offset from [`OffsetReport::offset`].
    pub spread: f64,
    pub levels: Vec<usize>,
    pub samples: usize,
}

/// Residual families of a reconstructed potential. All residuals are
/// relative: derivative residuals are divided by `1 + ‖T(X,H)‖_F`, direct
/// sums by `1 + ‖f̂(X⊕Y)‖_F`, and similarities by `cond(S)·(1 + ‖f̂(X)‖_F)`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub derivative_residual: f64,
    pub direct_sum_residual: f64,
    pub similarity_residual: f64,
    pub similarity_kind: &'static str,
    /// `tol + 10·absTol + κ/√M`.
    pub tolerance: f64,
    pub verdict: bool,
    pub levels: Vec<usize>,
    pub samples: usize,
    pub direct_sum_pairs: Vec<(usize, usize)>,
    pub notes: Vec<String>,
}

pub fn validate_potential<R: Rng + ?Sized>(
    fhat: &Arc<PotentialFunction>,
    t: &DemilinearMap,
    samples: usize,
    rng: &mut R,
    tol: f64,
) -> Result<ValidationReport> {
    let map = fhat.as_free_map();
    let domain = fhat.domain();
    let levels = fhat.levels().to_vec();
    let unitary_only = !domain.is_similarity_closed();
    let mut report = ValidationReport {
        derivative_residual: 0.0,
        direct_sum_residual: 0.0,
        similarity_residual: 0.0,
        similarity_kind: if unitary_only { "unitary" } else { "unipotent" },
        tolerance: tol + fhat.engine().config().tolerance(),
        verdict: true,
        levels: levels.clone(),
        samples,
        direct_sum_pairs: Vec::new(),
        notes: fhat.constants().notes.clone(),
    };
    if unitary_only {
        report
            .notes
            .push("domain is not similarity-closed; similarities restricted to unitaries".into());
    }
    for &n in &levels {
        for _ in 0..samples {
            let x = domain.sample_point(n, rng)?;
            let h = random_direction(t.g(), n, rng);
            let exact = t.eval(&x, &h)?;
            let limit = map.nc_derivative_limit(&x, &h, &DEFAULT_LADDER)?;
            report.derivative_residual = report
                .derivative_residual
                .max(limit.value.dist(&exact) / (1.0 + exact.frobenius_norm()));

            let s = if unitary_only {
                Similarity::unitary(haar_unitary(n, rng))?
            } else {
                upper_unipotent(n, SIMILARITY_COND_LIMIT, rng)
            };
            let fx = fhat.eval(&x)?;
            let lhs = fhat.eval(&x.conjugate(&s)?)?;
            let r = lhs.dist(&fx.conjugate(&s)?) / (s.cond() * (1.0 + fx.frobenius_norm()));
            report.similarity_residual = report.similarity_residual.max(r);
        }
    }
    for &m in &levels {
        for &n in &levels {
            if m > n || !levels.contains(&(m + n)) {
                continue;
            }
            for _ in 0..samples {
                let x = domain.sample_point(m, rng)?;
                let y = domain.sample_point(n, rng)?;
                let xy = x.direct_sum(&y)?;
                if !domain.contains(&xy) {
                    continue;
                }
                let whole = fhat.eval(&xy)?;
                let parts = fhat.eval(&x)?.direct_sum(&fhat.eval(&y)?)?;
                let r = whole.dist(&parts) / (1.0 + whole.frobenius_norm());
                report.direct_sum_residual = report.direct_sum_residual.max(r);
            }
            report.direct_sum_pairs.push((m, n));
        }
    }
    if report.direct_sum_pairs.is_empty() {
        report
            .notes
            .push("no covered pair of levels sums to a covered level; direct sums unchecked".into());
    }
    report.verdict = report.derivative_residual <= report.tolerance
        && report.direct_sum_residual <= report.tolerance
        && report.similarity_residual <= report.tolerance;
    Ok(report)
}

/// `‖β(S⁻¹XS) − S⁻¹β(X)S‖_F / (cond(S)·(1 + ‖β(X)‖_F))` over random points
/// and similarities, unitary ones when the domain is not similarity-closed.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SimilarityReport {
    pub residual: f64,
    pub similarity_kind: &'static str,
    pub trials: usize,
    pub tolerance: f64,
    pub verdict: bool,
}

pub fn similarity_check<R: Rng + ?Sized>(
    engine: &BetaEngine,
    levels: &[usize],
    trials: usize,
    rng: &mut R,
    tol: f64,
) -> Result<SimilarityReport> {
    let domain = engine.domain();
    let levels = domain.tested_levels(levels)?;
    let unitary_only = !domain.is_similarity_closed();
    let mut residual: f64 = 0.0;
    for i in 0..trials {
        let n = levels[i % levels.len()];
        let x = domain.sample_point(n, rng)?;
        let s = if unitary_only {
            Similarity::unitary(haar_unitary(n, rng))?
        } else {
            upper_unipotent(n, SIMILARITY_COND_LIMIT, rng)
        };
        let scale = 1.0 + engine.beta(&x)?.frobenius_norm();
        residual = residual.max(engine.similarity_residual(&x, &s)? / (s.cond() * scale));
    }
    let tolerance = tol + engine.config().tolerance();
    Ok(SimilarityReport {
        residual,
        similarity_kind: if unitary_only { "unitary" } else { "unipotent" },
        trials,
        tolerance,
        verdict: residual <= tolerance,
    })
}
