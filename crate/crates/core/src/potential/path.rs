use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{MatrixTuple, Similarity};

pub type PathFn = dyn Fn(f64) -> MatrixTuple + Send + Sync;

/// A C¹ path `γ: [0, 1] → M_n(ℂ)^g` with an evaluable derivative.
#[derive(Clone)]
pub enum SmoothPath {
    Segment {
        from: MatrixTuple,
        to: MatrixTuple,
    },
    /// Quadratic Bézier arc.
    Bezier {
        from: MatrixTuple,
        control: MatrixTuple,
        to: MatrixTuple,
    },
    /// Straight pieces traversed with smoothstep timing. The velocity
    /// vanishes at every waypoint.
    Polyline { points: Vec<MatrixTuple> },
    Parametric {
        g: usize,
        level: usize,
        gamma: Arc<PathFn>,
        velocity: Arc<PathFn>,
    },
    DirectSum(Box<SmoothPath>, Box<SmoothPath>),
    /// `t ↦ S⁻¹ γ(t) S`.
    Conjugated(Box<SmoothPath>, Similarity),
}

impl fmt::Debug for SmoothPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Segment { .. } => write!(f, "Segment(level {})", self.level()),
            Self::Bezier { .. } => write!(f, "Bezier(level {})", self.level()),
            Self::Polyline { points } => write!(f, "Polyline({} points)", points.len()),
            Self::Parametric { level, .. } => write!(f, "Parametric(level {level})"),
            Self::DirectSum(a, b) => write!(f, "DirectSum({a:?}, {b:?})"),
            Self::Conjugated(p, _) => write!(f, "Conjugated({p:?})"),
        }
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const PROBE_TIMES: [f64; 5] = [0.137, 0.291, 0.503, 0.688, 0.912];
const PROBE_STEP: f64 = 1e-5;
const PROBE_TOL: f64 = 1e-6;

impl SmoothPath {
    pub fn segment(from: MatrixTuple, to: MatrixTuple) -> Result<Self> {
        from.check_conforming(&to)?;
        Ok(Self::Segment { from, to })
    }

    pub fn bezier(from: MatrixTuple, control: MatrixTuple, to: MatrixTuple) -> Result<Self> {
        from.check_conforming(&control)?;
        from.check_conforming(&to)?;
        Ok(Self::Bezier { from, control, to })
    }

    pub fn polyline(points: Vec<MatrixTuple>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPath("a polyline needs at least two points".into()));
        }
        for p in &points[1..] {
            points[0].check_conforming(p)?;
        }
        Ok(Self::Polyline { points })
    }

    /// Closed polyline through `points` and back to the first one.
    pub fn closed_polyline(mut points: Vec<MatrixTuple>) -> Result<Self> {
        let first = points
            .first()
            .cloned()
            .ok_or_else(|| Error::InvalidPath("a loop needs points".into()))?;
        points.push(first);
        Self::polyline(points)
    }

    /// A user path; `velocity` is checked against central differences of
    /// `gamma` at five interior times.
    pub fn parametric(
        g: usize,
        level: usize,
        gamma: Arc<PathFn>,
        velocity: Arc<PathFn>,
    ) -> Result<Self> {
        for &t in PROBE_TIMES.iter().chain(&[0.0, 1.0]) {
            let p = gamma(t);
            let v = velocity(t);
            if p.g() != g || p.level() != level || v.g() != g || v.level() != level {
                return Err(Error::InvalidPath(format!(
                    "path values must be level-{level} {g}-tuples"
                )));
            }
            if !p.is_finite() || !v.is_finite() {
                return Err(Error::InvalidPath(format!("non-finite value at t = {t}")));
            }
        }
        for &t in &PROBE_TIMES {
            let cd = (&gamma(t + PROBE_STEP) - &gamma(t - PROBE_STEP)).scale(real(0.5 / PROBE_STEP));
            let v = velocity(t);
            let err = cd.dist(&v);
            if err > PROBE_TOL * (1.0 + v.frobenius_norm()) {
                return Err(Error::InvalidPath(format!(
                    "velocity disagrees with central differences at t = {t} (error {err:e})"
                )));
            }
        }
        Ok(Self::Parametric {
            g,
            level,
            gamma,
            velocity,
        })
    }

    pub fn direct_sum(a: SmoothPath, b: SmoothPath) -> Result<Self> {
        if a.g() != b.g() {
            return Err(Error::ArityMismatch {
                expected: a.g(),
                found: b.g(),
            });
        }
        Ok(Self::DirectSum(Box::new(a), Box::new(b)))
    }

    pub fn conjugated(p: SmoothPath, s: Similarity) -> Result<Self> {
        if s.dim() != p.level() {
            return Err(Error::LevelMismatch {
                expected: p.level(),
                found: s.dim(),
            });
        }
        Ok(Self::Conjugated(Box::new(p), s))
    }

    pub fn g(&self) -> usize {
        match self {
            Self::Segment { from, .. } | Self::Bezier { from, .. } => from.g(),
            Self::Polyline { points } => points[0].g(),
            Self::Parametric { g, .. } => *g,
            Self::DirectSum(a, _) => a.g(),
            Self::Conjugated(p, _) => p.g(),
        }
    }

    pub fn level(&self) -> usize {
        match self {
            Self::Segment { from, .. } | Self::Bezier { from, .. } => from.level(),
            Self::Polyline { points } => points[0].level(),
            Self::Parametric { level, .. } => *level,
            Self::DirectSum(a, b) => a.level() + b.level(),
            Self::Conjugated(p, _) => p.level(),
        }
    }

    pub fn point(&self, t: f64) -> MatrixTuple {
        match self {
            Self::Segment { from, to } => from.add_scaled(real(t), &(to - from)),
            Self::Bezier { from, control, to } => {
                let s = 1.0 - t;
                from.scale(real(s * s))
                    .add_scaled(real(2.0 * s * t), control)
                    .add_scaled(real(t * t), to)
            }
            Self::Polyline { points } => {
                let (j, s, _) = piece(points.len() - 1, t);
                let sigma = s * s * (3.0 - 2.0 * s);
                points[j].add_scaled(real(sigma), &(&points[j + 1] - &points[j]))
            }
            Self::Parametric { gamma, .. } => gamma(t),
            Self::DirectSum(a, b) => a.point(t).direct_sum(&b.point(t)).expect("same arity"),
            Self::Conjugated(p, s) => p.point(t).conjugate(s).expect("same level"),
        }
    }

    pub fn velocity(&self, t: f64) -> MatrixTuple {
        match self {
            Self::Segment { from, to } => to - from,
            Self::Bezier { from, control, to } => (control - from)
                .scale(real(2.0 * (1.0 - t)))
                .add_scaled(real(2.0 * t), &(to - control)),
            Self::Polyline { points } => {
                let (j, s, m) = piece(points.len() - 1, t);
                let dsigma = 6.0 * s * (1.0 - s) * m as f64;
                (&points[j + 1] - &points[j]).scale(real(dsigma))
            }
            Self::Parametric { velocity, .. } => velocity(t),
            Self::DirectSum(a, b) => a.velocity(t).direct_sum(&b.velocity(t)).expect("same arity"),
            Self::Conjugated(p, s) => p.velocity(t).conjugate(s).expect("same level"),
        }
    }

    pub fn start(&self) -> MatrixTuple {
        self.point(0.0)
    }

    pub fn end(&self) -> MatrixTuple {
        self.point(1.0)
    }

    /// Times where the path may lose smoothness; initial quadrature panels.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v = match self {
            Self::Polyline { points } => {
                let m = points.len() - 1;
                (0..=m).map(|j| j as f64 / m as f64).collect()
            }
            Self::DirectSum(a, b) => {
                let mut v = a.breakpoints();
                v.extend(b.breakpoints());
                v
            }
            Self::Conjugated(p, _) => p.breakpoints(),
            _ => vec![0.0, 1.0],
        };
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Points whose convex hull contains the path, when known.
    pub fn hull(&self) -> Option<Vec<MatrixTuple>> {
        match self {
            Self::Segment { from, to } => Some(vec![from.clone(), to.clone()]),
            Self::Bezier { from, control, to } => {
                Some(vec![from.clone(), control.clone(), to.clone()])
            }
            Self::Polyline { points } => Some(points.clone()),
            _ => None,
        }
    }
}

/// The piece containing `t` and the local parameter on it.
fn piece(m: usize, t: f64) -> (usize, f64, usize) {
    let x = t.clamp(0.0, 1.0) * m as f64;
    let j = (x.floor() as usize).min(m - 1);
    (j, x - j as f64, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::random::{random_tuple, upper_unipotent};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_velocity(p: &SmoothPath) {
        let h = 1e-6;
        for &t in &[0.1, 0.33, 0.45, 0.77, 0.95] {
            let cd = (&p.point(t + h) - &p.point(t - h)).scale(real(0.5 / h));
            let v = p.velocity(t);
            assert!(cd.dist(&v) <= 1e-7 * (1.0 + v.frobenius_norm()), "{p:?} at {t}");
        }
    }

    #[test]
    fn built_in_paths_have_consistent_velocity_and_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_tuple(2, 2, 1.0, &mut rng);
        let b = random_tuple(2, 2, 1.0, &mut rng);
        let c = random_tuple(2, 2, 1.0, &mut rng);
        let s = upper_unipotent(2, 100.0, &mut rng);
        let paths = vec![
            SmoothPath::segment(a.clone(), b.clone()).unwrap(),
            SmoothPath::bezier(a.clone(), c.clone(), b.clone()).unwrap(),
            SmoothPath::polyline(vec![a.clone(), c.clone(), b.clone()]).unwrap(),
            SmoothPath::direct_sum(
                SmoothPath::segment(a.clone(), b.clone()).unwrap(),
                SmoothPath::polyline(vec![b.clone(), c.clone(), a.clone()]).unwrap(),
            )
            .unwrap(),
            SmoothPath::conjugated(SmoothPath::segment(a.clone(), c.clone()).unwrap(), s).unwrap(),
        ];
        for p in &paths {
            check_velocity(p);
        }
        for p in &paths[..3] {
            assert!(p.start().dist(&a) < 1e-15);
            assert!(p.end().dist(&b) < 1e-15);
        }
        assert_eq!(paths[3].level(), 4);
        assert_eq!(paths[2].breakpoints(), vec![0.0, 0.5, 1.0]);
        assert!(paths[2].velocity(0.5).frobenius_norm() < 1e-12);
    }

    #[test]
    fn parametric_paths_are_validated() {
        let good = SmoothPath::parametric(
            1,
            1,
            Arc::new(|t| MatrixTuple::scalars(1, &[real(t.sin())])),
            Arc::new(|t| MatrixTuple::scalars(1, &[real(t.cos())])),
        );
        assert!(good.is_ok());
        let bad = SmoothPath::parametric(
            1,
            1,
            Arc::new(|t| MatrixTuple::scalars(1, &[real(t.sin())])),
            Arc::new(|t| MatrixTuple::scalars(1, &[real(2.0 * t.cos())])),
        );
        assert!(matches!(bad, Err(Error::InvalidPath(_))));
        let wrong_level = SmoothPath::parametric(
            1,
            2,
            Arc::new(|t| MatrixTuple::scalars(1, &[real(t)])),
            Arc::new(|_| MatrixTuple::scalars(1, &[real(1.0)])),
        );
        assert!(wrong_level.is_err());
        assert!(SmoothPath::polyline(vec![MatrixTuple::zeros(1, 1)]).is_err());
    }
}
