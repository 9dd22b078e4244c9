use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::DemiPoly;
use crate::domain::FreeDomain;
use crate::error::{Error, Result};
use crate::matcore::random::{complex_gaussian, random_direction, random_tuple};
use crate::matcore::{embed_upper, MatrixTuple};

/// Evaluator contract: `(X, H) ↦ T(X, H)`, linear in `H`, same level as the
/// inputs, and callable from several threads at once.
pub type DemiFn = dyn Fn(&MatrixTuple, &MatrixTuple) -> Result<MatrixTuple> + Send + Sync;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Symbolic,
    BlackBox,
}

const PROBE_SEED: u64 = 0x6c69_6e65_6172;
const LINEARITY_TOL: f64 = 1e-10;

/// A free demilinear map `T: Ω × M(ℂ)^g → M(ℂ)^h`.
#[derive(Clone)]
pub struct DemilinearMap {
    g: usize,
    h: usize,
    eval: Arc<DemiFn>,
    provenance: Provenance,
    symbolic: Option<Arc<DemiPoly>>,
}

impl fmt::Debug for DemilinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("DemilinearMap");
        d.field("g", &self.g).field("h", &self.h).field("provenance", &self.provenance);
        if let Some(p) = &self.symbolic {
            d.field("symbolic", &p.to_string());
        }
        d.finish()
    }
}

/// Outcome of [`DemilinearMap::curl_free_test`].
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CurlReport {
    /// Largest `‖curl‖ / (1 + scale)` over all probes.
    pub max_residual: f64,
    pub max_abs_residual: f64,
    pub tolerance: f64,
    pub curl_free: bool,
    pub levels_tested: Vec<usize>,
    pub samples_per_level: usize,
    pub only_level_one: bool,
    pub worst_point: Option<CurlWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurlWitness {
    pub level: usize,
    pub x: MatrixTuple,
    pub h: MatrixTuple,
    pub k: MatrixTuple,
    pub curl: MatrixTuple,
}

impl DemilinearMap {
    pub fn from_poly(p: DemiPoly) -> Self {
        let p = Arc::new(p);
        let q = Arc::clone(&p);
        Self {
            g: p.g(),
            h: p.h(),
            eval: Arc::new(move |x, h| q.eval(x, h)),
            provenance: Provenance::Symbolic,
            symbolic: Some(p),
        }
    }

    /// Wraps an evaluator after probing linearity in `H` at three random
    /// level-2 triples near the origin.
    pub fn black_box(g: usize, h: usize, f: Arc<DemiFn>) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        let x = random_tuple(g, 2, 0.1, &mut rng);
        Self::black_box_at(g, h, f, &x)
    }

    /// As [`DemilinearMap::black_box`], probing at the given point.
    pub fn black_box_at(g: usize, h: usize, f: Arc<DemiFn>, probe: &MatrixTuple) -> Result<Self> {
        let map = Self {
            g,
            h,
            eval: f,
            provenance: Provenance::BlackBox,
            symbolic: None,
        };
        map.probe_linearity(probe)?;
        Ok(map)
    }

    fn probe_linearity(&self, x: &MatrixTuple) -> Result<()> {
        if x.g() != self.g {
            return Err(Error::ArityMismatch {
                expected: self.g,
                found: x.g(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED ^ 1);
        let n = x.level();
        for _ in 0..3 {
            let h = random_tuple(self.g, n, 1.0, &mut rng);
            let k = random_tuple(self.g, n, 1.0, &mut rng);
            let a = complex_gaussian(&mut rng);
            let lhs = self.eval(x, &h.scale(a).add_scaled(Complex64::new(1.0, 0.0), &k))?;
            let th = self.eval(x, &h)?;
            let tk = self.eval(x, &k)?;
            let rhs = th.scale(a).add_scaled(Complex64::new(1.0, 0.0), &tk);
            let scale = 1.0 + lhs.frobenius_norm().max(th.frobenius_norm()).max(tk.frobenius_norm());
            let r = lhs.dist(&rhs);
            if !(r <= LINEARITY_TOL * scale) {
                return Err(Error::NotDemilinear(format!(
                    "linearity probe failed: ‖T(X,aH+K) − aT(X,H) − T(X,K)‖ = {r:e}"
                )));
            }
        }
        Ok(())
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn symbolic(&self) -> Option<&DemiPoly> {
        self.symbolic.as_deref()
    }

    pub fn eval(&self, x: &MatrixTuple, h: &MatrixTuple) -> Result<MatrixTuple> {
        if x.g() != self.g {
            return Err(Error::ArityMismatch {
                expected: self.g,
                found: x.g(),
            });
        }
        x.check_conforming(h)?;
        let out = (self.eval)(x, h)?;
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

    /// `DT(X,H)[K,L]`: upper-right block of `T` at the doubled pair.
    pub fn second_derivative(
        &self,
        x: &MatrixTuple,
        h: &MatrixTuple,
        k: &MatrixTuple,
        l: &MatrixTuple,
    ) -> Result<MatrixTuple> {
        x.check_conforming(h)?;
        x.check_conforming(k)?;
        x.check_conforming(l)?;
        self.eval(&embed_upper(x, k)?, &embed_upper(h, l)?)?.upper_right()
    }

    /// `DT(X,H)[K,0] − DT(X,K)[H,0]`.
    pub fn free_curl(&self, x: &MatrixTuple, h: &MatrixTuple, k: &MatrixTuple) -> Result<MatrixTuple> {
        let (a, b) = self.curl_terms(x, h, k)?;
        Ok(&a - &b)
    }

    fn curl_terms(
        &self,
        x: &MatrixTuple,
        h: &MatrixTuple,
        k: &MatrixTuple,
    ) -> Result<(MatrixTuple, MatrixTuple)> {
        let zero = MatrixTuple::zeros(x.g(), x.level());
        let a = self.second_derivative(x, h, k, &zero)?;
        let b = self.second_derivative(x, k, h, &zero)?;
        Ok((a, b))
    }

    /// Samples `samples` probes per tested level with `X` drawn from the
    /// domain and unit-Frobenius `H`, `K`.
    pub fn curl_free_test<R: Rng + ?Sized>(
        &self,
        domain: &FreeDomain,
        levels: &[usize],
        samples: usize,
        rng: &mut R,
        tol: f64,
    ) -> Result<CurlReport> {
        let tested = domain.tested_levels(levels)?;
        let mut report = CurlReport {
            max_residual: 0.0,
            max_abs_residual: 0.0,
            tolerance: tol,
            curl_free: true,
            levels_tested: tested.clone(),
            samples_per_level: samples,
            only_level_one: tested == [1],
            worst_point: None,
        };
        for &n in &tested {
            for _ in 0..samples {
                let x = domain.sample_point(n, rng)?;
                let h = random_direction(self.g, n, rng);
                let k = random_direction(self.g, n, rng);
                let (a, b) = self.curl_terms(&x, &h, &k)?;
                let curl = &a - &b;
                let abs = curl.frobenius_norm();
                let rel = abs / (1.0 + a.frobenius_norm().max(b.frobenius_norm()));
                report.max_abs_residual = report.max_abs_residual.max(abs);
                if report.worst_point.is_none() || rel > report.max_residual {
                    report.max_residual = rel;
                    report.worst_point = Some(CurlWitness {
                        level: n,
                        x,
                        h,
                        k,
                        curl,
                    });
                }
            }
        }
        report.curl_free = report.max_residual <= tol;
        Ok(report)
    }
}
