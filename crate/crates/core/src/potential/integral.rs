use serde::Serialize;

use super::path::SmoothPath;
use super::quadrature::{integrate, QuadratureConfig};
use crate::demilinear::DemilinearMap;
use crate::domain::FreeDomain;
use crate::error::{Error, Result};
use crate::matcore::{MatrixTuple, Similarity};

/// `I(T, γ) = ∫₀¹ T(γ(t), γ′(t)) dt`.
#[derive(Clone, Debug)]
pub struct LineIntegral {
    pub value: MatrixTuple,
    pub panels: usize,
    pub last_change: f64,
    /// False when the panel budget ran out before `abs_tol` was met.
    pub converged: bool,
}

pub fn line_integral(
    t: &DemilinearMap,
    path: &SmoothPath,
    q: &QuadratureConfig,
) -> Result<LineIntegral> {
    if path.g() != t.g() {
        return Err(Error::ArityMismatch {
            expected: t.g(),
            found: path.g(),
        });
    }
    let r = integrate(q, &path.breakpoints(), |s| t.eval(&path.point(s), &path.velocity(s)))?;
    Ok(LineIntegral {
        value: r.value,
        panels: r.panels,
        last_change: r.last_change,
        converged: r.converged,
    })
}

/// As [`line_integral`], first checking that the path stays in `domain`.
/// Paths with a known hull in a convex domain are checked at the hull
/// points; others at every quadrature node.
pub fn line_integral_in(
    t: &DemilinearMap,
    path: &SmoothPath,
    domain: &FreeDomain,
    q: &QuadratureConfig,
) -> Result<LineIntegral> {
    match path.hull() {
        Some(points) if domain.is_convex() => {
            for p in &points {
                domain.check(p)?;
            }
            line_integral(t, path, q)
        }
        _ => {
            let checked = |s: f64| -> Result<MatrixTuple> {
                let x = path.point(s);
                domain.check(&x)?;
                t.eval(&x, &path.velocity(s))
            };
            let r = integrate(q, &path.breakpoints(), checked)?;
            Ok(LineIntegral {
                value: r.value,
                panels: r.panels,
                last_change: r.last_change,
                converged: r.converged,
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IntegralFreeReport {
    /// `‖I(T, γ⊕η) − I(T,γ) ⊕ I(T,η)‖_F`.
    pub direct_sum_residual: f64,
    /// `‖I(T, S⁻¹γS) − S⁻¹ I(T,γ) S‖_F`.
    pub similarity_residual: f64,
    pub converged: bool,
}

pub fn integral_free_check(
    t: &DemilinearMap,
    gamma: &SmoothPath,
    eta: &SmoothPath,
    s: &Similarity,
    q: &QuadratureConfig,
) -> Result<IntegralFreeReport> {
    let ig = line_integral(t, gamma, q)?;
    let ie = line_integral(t, eta, q)?;
    let sum = line_integral(t, &SmoothPath::direct_sum(gamma.clone(), eta.clone())?, q)?;
    let conj = line_integral(t, &SmoothPath::conjugated(gamma.clone(), s.clone())?, q)?;
    Ok(IntegralFreeReport {
        direct_sum_residual: sum.value.dist(&ig.value.direct_sum(&ie.value)?),
        similarity_residual: conj.value.dist(&ig.value.conjugate(s)?),
        converged: ig.converged && ie.converged && sum.converged && conj.converged,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PathIndependenceReport {
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: bool,
}

const ENDPOINT_TOL: f64 = 1e-12;

pub fn path_independence_test(
    t: &DemilinearMap,
    gamma1: &SmoothPath,
    gamma2: &SmoothPath,
    q: &QuadratureConfig,
    tol: f64,
) -> Result<PathIndependenceReport> {
    let gap = gamma1
        .start()
        .dist(&gamma2.start())
        .max(gamma1.end().dist(&gamma2.end()));
    if !(gap <= ENDPOINT_TOL) {
        return Err(Error::EndpointMismatch(gap));
    }
    let a = line_integral(t, gamma1, q)?;
    let b = line_integral(t, gamma2, q)?;
    let residual = a.value.dist(&b.value);
    Ok(PathIndependenceReport {
        residual,
        tolerance: tol,
        verdict: residual <= tol,
    })
}

/// A path from `y` to `x` inside the domain: a segment on convex domains,
/// else a polyline through the caller's waypoints.
pub fn plan_path(
    domain: &FreeDomain,
    y: &MatrixTuple,
    x: &MatrixTuple,
    waypoints: Option<&[MatrixTuple]>,
) -> Result<SmoothPath> {
    domain.check(x)?;
    domain.check(y)?;
    match waypoints {
        Some(w) if !w.is_empty() => {
            let mut pts = Vec::with_capacity(w.len() + 2);
            pts.push(y.clone());
            pts.extend_from_slice(w);
            pts.push(x.clone());
            SmoothPath::polyline(pts)
        }
        _ if domain.is_convex() => SmoothPath::segment(y.clone(), x.clone()),
        _ => Err(Error::NoPath(x.level())),
    }
}

/// `Φ(X, Y) = I(T, γ)` along a planned path from `Y` to `X`.
pub fn phi(
    t: &DemilinearMap,
    x: &MatrixTuple,
    y: &MatrixTuple,
    domain: &FreeDomain,
    q: &QuadratureConfig,
) -> Result<MatrixTuple> {
    let path = plan_path(domain, y, x, None)?;
    Ok(line_integral_in(t, &path, domain, q)?.value)
}
