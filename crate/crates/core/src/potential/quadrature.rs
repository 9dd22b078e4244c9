use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::MatrixTuple;

/// Composite Gauss–Legendre with panel doubling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QuadratureConfig {
    pub nodes: usize,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes: 16,
            abs_tol: 1e-10,
            max_panels: 1024,
        }
    }
}

impl QuadratureConfig {
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::Config(format!(
                "quadrature needs at least 2 nodes per panel, got {}",
                self.nodes
            )));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Config(format!(
                "quadrature tolerance must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_panels == 0 {
            return Err(Error::Config("max_panels must be positive".into()));
        }
        Ok(())
    }
}

/// An integral estimate and how it was reached.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub value: MatrixTuple,
    pub panels: usize,
    /// `‖I_{2P} − I_P‖_F` at the last refinement.
    pub last_change: f64,
    pub converged: bool,
    pub evaluations: usize,
}

pub(crate) struct Rule {
    /// Nodes and weights mapped to `[0, 1]`.
    pairs: Vec<(f64, f64)>,
}

impl Rule {
    pub(crate) fn new(nodes: usize) -> Self {
        let n = NonZeroUsize::new(nodes).expect("validated node count");
        let pairs = GaussLegendre::new(n)
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        Self { pairs }
    }

    fn panel_sum(
        &self,
        a: f64,
        b: f64,
        f: &mut impl FnMut(f64) -> Result<MatrixTuple>,
        acc: &mut Option<MatrixTuple>,
    ) -> Result<()> {
        let len = b - a;
        for &(x, w) in &self.pairs {
            let v = f(a + len * x)?;
            let c = Complex64::new(w * len, 0.0);
            *acc = Some(match acc.take() {
                None => v.scale(c),
                Some(s) => s.add_scaled(c, &v),
            });
        }
        Ok(())
    }

    fn composite(
        &self,
        breaks: &[f64],
        f: &mut impl FnMut(f64) -> Result<MatrixTuple>,
    ) -> Result<MatrixTuple> {
        let mut acc = None;
        for w in breaks.windows(2) {
            self.panel_sum(w[0], w[1], f, &mut acc)?;
        }
        Ok(acc.expect("at least one panel"))
    }
}

fn refine(breaks: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * breaks.len() - 1);
    for w in breaks.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*breaks.last().expect("nonempty"));
    out
}

/// Integrates `f` over `[0, 1]` starting from the panels given by
/// `breakpoints`, doubling until successive estimates agree to `abs_tol`.
pub fn integrate(
    q: &QuadratureConfig,
    breakpoints: &[f64],
    mut f: impl FnMut(f64) -> Result<MatrixTuple>,
) -> Result<Quadrature> {
    q.validate()?;
    let rule = Rule::new(q.nodes);
    let mut breaks = breakpoints.to_vec();
    let mut coarse = rule.composite(&breaks, &mut f)?;
    let mut evaluations = (breaks.len() - 1) * q.nodes;
    let mut last_change = f64::INFINITY;
    loop {
        let panels = breaks.len() - 1;
        if 2 * panels > q.max_panels {
            return Ok(Quadrature {
                value: coarse,
                panels,
                last_change,
                converged: false,
                evaluations,
            });
        }
        let fine_breaks = refine(&breaks);
        let fine = rule.composite(&fine_breaks, &mut f)?;
        evaluations += 2 * panels * q.nodes;
        last_change = fine.dist(&coarse);
        breaks = fine_breaks;
        coarse = fine;
        if last_change <= q.abs_tol {
            return Ok(Quadrature {
                value: coarse,
                panels: 2 * panels,
                last_change,
                converged: true,
                evaluations,
            });
        }
    }
}
