use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integral::phi;
use super::quadrature::QuadratureConfig;
use crate::demilinear::DemilinearMap;
use crate::domain::FreeDomain;
use crate::error::{Error, Result};
use crate::matcore::random::haar_unitary;
use crate::matcore::{CMatrix, MatrixTuple, Similarity};
use crate::rng::SeedStream;

/// Settings shared by every stage of the reconstruction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PotentialConfig {
    pub quadrature: QuadratureConfig,
    /// Haar sample count `M`.
    pub samples: usize,
    pub seed: u64,
    /// Monte-Carlo tolerance multiplier in `10·absTol + κ/√M`.
    pub kappa: f64,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            samples: 2000,
            seed: 42,
            kappa: 5.0,
        }
    }
}

impl PotentialConfig {
    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        if self.samples == 0 {
            return Err(Error::Config("the Haar sample count must be positive".into()));
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::Config("kappa must be a nonnegative number".into()));
        }
        Ok(())
    }

    /// Relative tolerance `10·absTol + κ/√M`.
    pub fn tolerance(&self) -> f64 {
        10.0 * self.quadrature.abs_tol + self.kappa / (self.samples as f64).sqrt()
    }
}

type MemoKey = (usize, Vec<u64>);

/// Evaluates `α_n(X) = Φ(X, Z_n)` and the Haar average
/// `β_n(X) = (1/M) Σ_j U_j* Φ(U_j X U_j*, Z_n) U_j`.
///
/// Each level uses one fixed ensemble `U_1..U_M`, drawn from counter-indexed
/// substreams of the seed, so `β` is a deterministic function of `X`.
pub struct BetaEngine {
    t: DemilinearMap,
    domain: FreeDomain,
    config: PotentialConfig,
    stream: SeedStream,
    ensembles: Mutex<HashMap<usize, Arc<Vec<CMatrix>>>>,
    memo: Mutex<HashMap<MemoKey, MatrixTuple>>,
}

fn memo_key(x: &MatrixTuple) -> MemoKey {
    let bits = x
        .components()
        .iter()
        .flat_map(|m| m.as_slice().iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]))
        .collect();
    (x.level(), bits)
}

impl BetaEngine {
    pub fn new(t: DemilinearMap, domain: FreeDomain, config: PotentialConfig) -> Result<Self> {
        config.validate()?;
        if domain.g() != t.g() {
            return Err(Error::ArityMismatch {
                expected: t.g(),
                found: domain.g(),
            });
        }
        Ok(Self {
            t,
            domain,
            config,
            stream: SeedStream::new(config.seed).labeled("haar"),
            ensembles: Mutex::new(HashMap::new()),
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn map(&self) -> &DemilinearMap {
        &self.t
    }

    pub fn domain(&self) -> &FreeDomain {
        &self.domain
    }

    pub fn config(&self) -> &PotentialConfig {
        &self.config
    }

    /// The validated anchor `Z_n`.
    pub fn anchor(&self, n: usize) -> Result<MatrixTuple> {
        let z = self.domain.anchor(n)?;
        if !self.domain.contains(&z) {
            return Err(Error::Anchor(format!("the level-{n} anchor is outside the domain")));
        }
        Ok(z)
    }

    pub fn ensemble(&self, n: usize) -> Arc<Vec<CMatrix>> {
        let mut guard = self.ensembles.lock().expect("ensemble cache");
        Arc::clone(guard.entry(n).or_insert_with(|| {
            let level = self.stream.substream(n as u64);
            Arc::new(
                (0..self.config.samples)
                    .map(|j| haar_unitary(n, &mut level.substream(j as u64).rng()))
                    .collect(),
            )
        }))
    }

    pub fn phi(&self, x: &MatrixTuple, y: &MatrixTuple) -> Result<MatrixTuple> {
        phi(&self.t, x, y, &self.domain, &self.config.quadrature)
    }

    pub fn alpha(&self, x: &MatrixTuple) -> Result<MatrixTuple> {
        self.phi(x, &self.anchor(x.level())?)
    }

    pub fn beta(&self, x: &MatrixTuple) -> Result<MatrixTuple> {
        let key = memo_key(x);
        if let Some(v) = self.memo.lock().expect("beta cache").get(&key) {
            return Ok(v.clone());
        }
        let n = x.level();
        let z = self.anchor(n)?;
        let us = self.ensemble(n);
        let terms: Vec<MatrixTuple> = us
            .par_iter()
            .map(|u| {
                let ua = u.adjoint();
                let rotated = x.sandwich(u, &ua);
                Ok(self.phi(&rotated, &z)?.sandwich(&ua, u))
            })
            .collect::<Result<_>>()?;
        // Summed in sample order.
        let mut acc = MatrixTuple::zeros(self.t.h(), n);
        for v in &terms {
            acc = acc.add_scaled(Complex64::new(1.0, 0.0), v);
        }
        let value = acc.scale(Complex64::new(1.0 / us.len() as f64, 0.0));
        self.memo
            .lock()
            .expect("beta cache")
            .insert(key, value.clone());
        Ok(value)
    }

    /// `‖β(S⁻¹XS) − S⁻¹β(X)S‖_F`.
    pub fn similarity_residual(&self, x: &MatrixTuple, s: &Similarity) -> Result<f64> {
        let lhs = self.beta(&x.conjugate(s)?)?;
        let rhs = self.beta(x)?.conjugate(s)?;
        Ok(lhs.dist(&rhs))
    }
}
