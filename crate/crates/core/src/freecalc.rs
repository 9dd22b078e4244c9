//! Free maps and their nc derivatives.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::demilinear::{DemiFn, DemilinearMap};
use crate::domain::FreeDomain;
use crate::error::{Error, Result};
use crate::matcore::random::{haar_unitary, upper_unipotent};
use crate::matcore::{embed_upper, CMatrix, MatrixTuple, Similarity};
use crate::ncpoly::NcPoly;

/// Evaluator contract: level-preserving and callable from several threads.
pub type FreeFn = dyn Fn(&MatrixTuple) -> Result<MatrixTuple> + Send + Sync;

/// Default forward-difference ladder for [`FreeMap::nc_derivative_limit`].
pub const DEFAULT_LADDER: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Condition bound for random similarities in [`FreeMap::verify_free`].
pub const SIMILARITY_COND_LIMIT: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapProvenance {
    Polynomial,
    BlackBox,
}

/// A level-wise map `f: Ω → M(ℂ)^h`.
#[derive(Clone)]
pub struct FreeMap {
    g: usize,
    h: usize,
    eval: Arc<FreeFn>,
    provenance: MapProvenance,
    poly: Option<Arc<NcPoly>>,
}

impl fmt::Debug for FreeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("FreeMap");
        d.field("g", &self.g).field("h", &self.h).field("provenance", &self.provenance);
        if let Some(p) = &self.poly {
            d.field("poly", &p.to_string());
        }
        d.finish()
    }
}

/// Result of the limit-based derivative engine.
#[derive(Clone, Debug)]
pub struct LimitDerivative {
    pub value: MatrixTuple,
    /// Norm of the last Richardson increment.
    pub error_estimate: f64,
    /// Set when successive difference quotients move apart as the step shrinks.
    pub diverging: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FreeReport {
    pub direct_sum_residual: f64,
    pub similarity_residual: f64,
    pub tolerance: f64,
    pub verdict: bool,
    /// `"unipotent"` on similarity-closed domains, `"unitary"` otherwise.
    pub similarity_kind: &'static str,
    pub levels_tested: Vec<usize>,
    pub trials: usize,
    pub direct_sum_checks: usize,
    pub worst_similarity: Option<SimilarityWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimilarityWitness {
    pub level: usize,
    pub s: CMatrix,
    pub x: MatrixTuple,
    pub residual: f64,
}

impl FreeMap {
    pub fn from_poly(p: NcPoly) -> Self {
        let p = Arc::new(p);
        let q = Arc::clone(&p);
        Self {
            g: p.g(),
            h: p.h(),
            eval: Arc::new(move |x| q.eval(x)),
            provenance: MapProvenance::Polynomial,
            poly: Some(p),
        }
    }

    pub fn black_box(g: usize, h: usize, f: Arc<FreeFn>) -> Self {
        Self {
            g,
            h,
            eval: f,
            provenance: MapProvenance::BlackBox,
            poly: None,
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn provenance(&self) -> MapProvenance {
        self.provenance
    }

    pub fn poly(&self) -> Option<&NcPoly> {
        self.poly.as_deref()
    }

    pub fn eval(&self, x: &MatrixTuple) -> Result<MatrixTuple> {
        if x.g() != self.g {
            return Err(Error::ArityMismatch {
                expected: self.g,
                found: x.g(),
            });
        }
        let out = (self.eval)(x)?;
        if out.g() != self.h || out.level() != x.level() {
            return Err(Error::Evaluator(format!(
                "expected {} outputs at level {}, got {} at level {}",
                self.h,
                x.level(),
                out.g(),
                out.level()
            )));
        }
        if !out.is_finite() {
            return Err(Error::Evaluator("non-finite output".into()));
        }
        Ok(out)
    }

    /// `Df(X)[H]` as the upper-right block of `f([[X, H], [0, X]])`.
    pub fn nc_derivative(&self, x: &MatrixTuple, h: &MatrixTuple) -> Result<MatrixTuple> {
        self.eval(&embed_upper(x, h)?)?.upper_right()
    }

    /// Forward differences `(f(X + tH) − f(X)) / t` on a descending ladder,
    /// with one Richardson stage.
    pub fn nc_derivative_limit(
        &self,
        x: &MatrixTuple,
        h: &MatrixTuple,
        steps: &[f64],
    ) -> Result<LimitDerivative> {
        x.check_conforming(h)?;
        if steps.len() < 3 || steps.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
            return Err(Error::Config(
                "the step ladder needs at least three positive, strictly decreasing steps".into(),
            ));
        }
        let base = self.eval(x)?;
        let quotients = steps
            .iter()
            .map(|&t| {
                let fx = self.eval(&x.add_scaled(Complex64::new(t, 0.0), h))?;
                Ok((&fx - &base).scale(Complex64::new(1.0 / t, 0.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        let extrapolated: Vec<MatrixTuple> = steps
            .windows(2)
            .zip(quotients.windows(2))
            .map(|(t, d)| {
                let r = t[0] / t[1];
                d[1].scale(Complex64::new(r / (r - 1.0), 0.0))
                    .add_scaled(Complex64::new(-1.0 / (r - 1.0), 0.0), &d[0])
            })
            .collect();
        let last = extrapolated.len() - 1;
        let error_estimate = extrapolated[last].dist(&extrapolated[last - 1]);
        let floor = 1e3 * f64::EPSILON * (1.0 + base.frobenius_norm()) / steps[steps.len() - 1];
        let increments: Vec<f64> = quotients.windows(2).map(|d| d[1].dist(&d[0])).collect();
        let diverging = increments
            .windows(2)
            .any(|w| w[1] > w[0] && w[1] > floor);
        Ok(LimitDerivative {
            value: extrapolated[last].clone(),
            error_estimate,
            diverging,
        })
    }

    /// `(X, H) ↦ Df(X)[H]` as a demilinear map, probed for linearity at the
    /// origin of level 2.
    pub fn derivative_as_demilinear(&self) -> Result<DemilinearMap> {
        let probe = MatrixTuple::zeros(self.g, 2);
        self.derivative_as_demilinear_at(&probe)
    }

    pub fn derivative_as_demilinear_at(&self, probe: &MatrixTuple) -> Result<DemilinearMap> {
        let f = self.clone();
        let eval: Arc<DemiFn> = Arc::new(move |x, h| f.nc_derivative(x, h));
        DemilinearMap::black_box_at(self.g, self.h, eval, probe)
    }

    /// `‖f(S⁻¹XS) − S⁻¹f(X)S‖_F`.
    pub fn similarity_residual(&self, x: &MatrixTuple, s: &Similarity) -> Result<f64> {
        let lhs = self.eval(&x.conjugate(s)?)?;
        let rhs = self.eval(x)?.conjugate(s)?;
        Ok(lhs.dist(&rhs))
    }

    /// `‖f(X⊕Y) − f(X)⊕f(Y)‖_F`.
    pub fn direct_sum_residual(&self, x: &MatrixTuple, y: &MatrixTuple) -> Result<f64> {
        let lhs = self.eval(&x.direct_sum(y)?)?;
        let rhs = self.eval(x)?.direct_sum(&self.eval(y)?)?;
        Ok(lhs.dist(&rhs))
    }

    /// The `(1, 4)` block of `f` at the point `[[X,H,K,0],[0,X,0,K],[0,0,X,H],[0,0,0,X]]`.
    pub fn clairaut_block(
        &self,
        x: &MatrixTuple,
        h: &MatrixTuple,
        k: &MatrixTuple,
    ) -> Result<MatrixTuple> {
        let point = embed_upper(&embed_upper(x, h)?, &k.direct_sum(k)?)?;
        let n = x.level();
        self.eval(&point)?.extract_blocks(&[n, n, n, n])?.tuple(0, 3)
    }

    /// Samples points and similarities and checks both free-map axioms.
    /// Residuals are relative: divided by `cond(S) · (1 + scale)` for
    /// similarities and by `1 + scale` for direct sums.
    pub fn verify_free<R: Rng + ?Sized>(
        &self,
        domain: &FreeDomain,
        levels: &[usize],
        trials: usize,
        rng: &mut R,
        tol: f64,
    ) -> Result<FreeReport> {
        let tested = domain.tested_levels(levels)?;
        let unitary_only = !domain.is_similarity_closed();
        let mut report = FreeReport {
            direct_sum_residual: 0.0,
            similarity_residual: 0.0,
            tolerance: tol,
            verdict: true,
            similarity_kind: if unitary_only { "unitary" } else { "unipotent" },
            levels_tested: tested.clone(),
            trials,
            direct_sum_checks: 0,
            worst_similarity: None,
        };
        for t in 0..trials {
            let n = tested[t % tested.len()];
            let x = domain.sample_point(n, rng)?;
            let fx = self.eval(&x)?;

            let s = if unitary_only {
                Similarity::unitary(haar_unitary(n, rng))?
            } else {
                upper_unipotent(n, SIMILARITY_COND_LIMIT, rng)
            };
            let scale = 1.0 + fx.frobenius_norm();
            let sim = self.similarity_residual(&x, &s)? / (s.cond() * scale);
            if report.worst_similarity.is_none() || sim > report.similarity_residual {
                report.similarity_residual = sim;
                report.worst_similarity = Some(SimilarityWitness {
                    level: n,
                    s: s.matrix().clone(),
                    x: x.clone(),
                    residual: sim,
                });
            }

            let partner = tested
                .iter()
                .copied()
                .cycle()
                .skip(t + 1)
                .take(tested.len())
                .find(|&m| domain.has_level(n + m));
            if let Some(m) = partner {
                let y = domain.sample_point(m, rng)?;
                let xy = x.direct_sum(&y)?;
                if domain.contains(&xy) {
                    let r = self.direct_sum_residual(&x, &y)? / scale;
                    report.direct_sum_residual = report.direct_sum_residual.max(r);
                    report.direct_sum_checks += 1;
                }
            }
        }
        report.verdict = report.similarity_residual <= tol && report.direct_sum_residual <= tol;
        Ok(report)
    }
}
