//! Free domains: graded sets of matrix tuples with a declared level set.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::random::{ginibre, random_tuple};
use crate::matcore::{CMatrix, MatrixTuple};

pub type Predicate = dyn Fn(&MatrixTuple) -> bool + Send + Sync;

#[derive(Clone)]
pub enum DomainKind {
    Full,
    /// `max_i ‖X_i − c_i I‖_op < radius`.
    Ball { radius: f64, center: Vec<Complex64> },
    Custom { name: String, predicate: Arc<Predicate> },
}

impl fmt::Debug for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Full => f.write_str("Full"),
            Self::Ball { radius, center } => f
                .debug_struct("Ball")
                .field("radius", radius)
                .field("center", center)
                .finish(),
            Self::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

/// The levels `n` at which the domain is nonempty.
#[derive(Clone, Debug, PartialEq)]
pub enum LevelSet {
    All,
    Finite(BTreeSet<usize>),
}

impl LevelSet {
    pub fn contains(&self, n: usize) -> bool {
        n > 0
            && match self {
                Self::All => true,
                Self::Finite(s) => s.contains(&n),
            }
    }

    pub fn min(&self) -> Option<usize> {
        match self {
            Self::All => Some(1),
            Self::Finite(s) => s.first().copied(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FreeDomain {
    g: usize,
    kind: DomainKind,
    levels: LevelSet,
    anchors: BTreeMap<usize, MatrixTuple>,
    connected: bool,
}

/// JSON form: `{"kind": "ball"|"full", "radius", "center", "levels", "anchors"}`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<MatrixTuple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub anchors: BTreeMap<usize, MatrixTuple>,
}

impl FreeDomain {
    pub fn full(g: usize) -> Self {
        Self {
            g,
            kind: DomainKind::Full,
            levels: LevelSet::All,
            anchors: BTreeMap::new(),
            connected: true,
        }
    }

    /// Operator-norm ball around the scalar point `center ⊗ I`.
    pub fn ball(radius: f64, center: Vec<Complex64>) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::Config("ball center needs at least one coordinate".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Config(format!("ball radius must be positive, got {radius}")));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("ball center must be finite".into()));
        }
        Ok(Self {
            g: center.len(),
            kind: DomainKind::Ball { radius, center },
            levels: LevelSet::All,
            anchors: BTreeMap::new(),
            connected: true,
        })
    }

    /// A domain given by a membership predicate. Each level must receive an
    /// anchor through [`FreeDomain::with_anchor`] before it can be sampled.
    pub fn custom(
        g: usize,
        name: impl Into<String>,
        levels: impl IntoIterator<Item = usize>,
        predicate: Arc<Predicate>,
    ) -> Self {
        Self {
            g,
            kind: DomainKind::Custom {
                name: name.into(),
                predicate,
            },
            levels: LevelSet::Finite(levels.into_iter().filter(|&n| n > 0).collect()),
            anchors: BTreeMap::new(),
            connected: true,
        }
    }

    pub fn from_spec(spec: &DomainSpec, g: usize) -> Result<Self> {
        let mut d = match spec.kind.as_str() {
            "full" => {
                if spec.radius.is_some() || spec.center.is_some() {
                    return Err(Error::Config("full-space domains take no radius or center".into()));
                }
                Self::full(g)
            }
            "ball" => {
                let radius = spec
                    .radius
                    .ok_or_else(|| Error::Config("ball domains need a radius".into()))?;
                let center = match &spec.center {
                    None => vec![Complex64::new(0.0, 0.0); g],
                    Some(c) if c.level() != 1 => {
                        return Err(Error::Config(
                            "ball centers are scalar points: give a level-1 tuple".into(),
                        ))
                    }
                    Some(c) => c.components().iter().map(|m| m.get(0, 0)).collect(),
                };
                if center.len() != g {
                    return Err(Error::ArityMismatch {
                        expected: g,
                        found: center.len(),
                    });
                }
                Self::ball(radius, center)?
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown domain kind '{other}' (expected \"full\" or \"ball\")"
                )))
            }
        };
        if let Some(levels) = &spec.levels {
            d = d.with_levels(levels.iter().copied())?;
        }
        for (&n, z) in &spec.anchors {
            if z.level() != n {
                return Err(Error::LevelMismatch {
                    expected: n,
                    found: z.level(),
                });
            }
            d = d.with_anchor(z.clone())?;
        }
        Ok(d)
    }

    pub fn parse_spec(text: &str, g: usize) -> Result<Self> {
        let spec: DomainSpec = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("domain spec: {e}")))?;
        Self::from_spec(&spec, g)
    }

    /// Restricts the declared level set.
    pub fn with_levels(mut self, levels: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = levels.into_iter().collect();
        if set.is_empty() || set.contains(&0) {
            return Err(Error::Config("levels must be a nonempty set of positive integers".into()));
        }
        self.levels = LevelSet::Finite(set);
        Ok(self)
    }

    /// Overrides the anchor at `z.level()`.
    pub fn with_anchor(mut self, z: MatrixTuple) -> Result<Self> {
        if z.g() != self.g {
            return Err(Error::ArityMismatch {
                expected: self.g,
                found: z.g(),
            });
        }
        if !self.contains(&z) {
            return Err(Error::Anchor(format!(
                "the anchor at level {} is outside the domain",
                z.level()
            )));
        }
        self.anchors.insert(z.level(), z);
        Ok(self)
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn levels(&self) -> &LevelSet {
        &self.levels
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    pub fn has_level(&self, n: usize) -> bool {
        self.levels.contains(n)
    }

    /// Requested levels that the domain declares nonempty.
    pub fn tested_levels(&self, requested: &[usize]) -> Result<Vec<usize>> {
        let out: Vec<usize> = requested
            .iter()
            .copied()
            .filter(|&n| self.has_level(n))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if out.is_empty() {
            return Err(Error::EmptyDomain(requested.to_vec()));
        }
        Ok(out)
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self.kind, DomainKind::Custom { .. })
    }

    pub fn is_similarity_closed(&self) -> bool {
        matches!(self.kind, DomainKind::Full)
    }

    pub fn contains(&self, x: &MatrixTuple) -> bool {
        if x.g() != self.g || !self.has_level(x.level()) || !x.is_finite() {
            return false;
        }
        match &self.kind {
            DomainKind::Full => true,
            DomainKind::Ball { radius, center } => {
                ball_distance(x, center).is_some_and(|d| d < *radius)
            }
            DomainKind::Custom { predicate, .. } => predicate(x),
        }
    }

    pub fn check(&self, x: &MatrixTuple) -> Result<()> {
        if x.g() != self.g {
            return Err(Error::ArityMismatch {
                expected: self.g,
                found: x.g(),
            });
        }
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(format!(
                "level-{} point is not in the {} domain",
                x.level(),
                self.kind_name()
            )))
        }
    }

    pub fn kind_name(&self) -> &str {
        match &self.kind {
            DomainKind::Full => "full",
            DomainKind::Ball { .. } => "ball",
            DomainKind::Custom { name, .. } => name,
        }
    }

    /// Base point `Z_n`: an explicit anchor, else the ball center or 0.
    pub fn anchor(&self, n: usize) -> Result<MatrixTuple> {
        if !self.has_level(n) {
            return Err(Error::Anchor(format!("level {n} is not in the domain")));
        }
        if let Some(z) = self.anchors.get(&n) {
            return Ok(z.clone());
        }
        match &self.kind {
            DomainKind::Full => Ok(MatrixTuple::zeros(self.g, n)),
            DomainKind::Ball { center, .. } => Ok(MatrixTuple::scalars(n, center)),
            DomainKind::Custom { name, .. } => Err(Error::Anchor(format!(
                "custom domain '{name}' has no anchor at level {n}"
            ))),
        }
    }

    /// Random point of `Ω[n]` with entries of order one.
    pub fn sample_point<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<MatrixTuple> {
        if !self.has_level(n) {
            return Err(Error::EmptyDomain(vec![n]));
        }
        let spread = 0.5 / (n as f64).sqrt();
        match &self.kind {
            DomainKind::Full => Ok(random_tuple(self.g, n, spread * 2.0, rng)),
            DomainKind::Ball { radius, center } => {
                let comps = center
                    .iter()
                    .map(|&c| {
                        let p = ginibre(n, 1.0, rng);
                        let target = 0.5 * radius * rng.random_range(0.2..1.0);
                        let mut m = p.scale(Complex64::new(target / p.op_norm().max(1e-300), 0.0));
                        m += &CMatrix::scalar(n, c);
                        m
                    })
                    .collect();
                MatrixTuple::new(comps)
            }
            DomainKind::Custom { .. } => {
                let base = self.anchor(n)?;
                let mut delta = spread;
                for _ in 0..40 {
                    let p = random_tuple(self.g, n, delta, rng);
                    let x = &base + &p;
                    if self.contains(&x) {
                        return Ok(x);
                    }
                    delta *= 0.5;
                }
                Err(Error::OutsideDomain(format!(
                    "could not sample a level-{n} point near the anchor"
                )))
            }
        }
    }

    /// Summary for reports.
    pub fn describe(&self) -> serde_json::Value {
        let levels = match &self.levels {
            LevelSet::All => serde_json::Value::from("all"),
            LevelSet::Finite(s) => serde_json::Value::from(s.iter().copied().collect::<Vec<_>>()),
        };
        let mut v = serde_json::json!({ "kind": self.kind_name(), "g": self.g, "levels": levels });
        if let DomainKind::Ball { radius, center } = &self.kind {
            v["radius"] = (*radius).into();
            v["center"] = center
                .iter()
                .map(|c| serde_json::json!([c.re, c.im]))
                .collect::<Vec<_>>()
                .into();
        }
        if !self.anchors.is_empty() {
            v["anchorLevels"] = self.anchors.keys().copied().collect::<Vec<_>>().into();
        }
        v
    }
}

/// `max_i ‖X_i − c_i I‖_op`, using the Frobenius bound to skip the SVD.
fn ball_distance(x: &MatrixTuple, center: &[Complex64]) -> Option<f64> {
    let n = x.level();
    let mut worst: f64 = 0.0;
    for (m, &c) in x.components().iter().zip(center) {
        let d = m - &CMatrix::scalar(n, c);
        let fro = d.frobenius_norm();
        if fro <= worst {
            continue;
        }
        worst = worst.max(d.op_norm());
    }
    worst.is_finite().then_some(worst)
}
