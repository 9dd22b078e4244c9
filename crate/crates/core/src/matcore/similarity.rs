use super::CMatrix;
use crate::error::{Error, Result};

/// Largest accepted condition-number estimate.
pub const MAX_CONDITION: f64 = 1e12;

/// An invertible matrix `S` with its inverse cached at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Similarity {
    matrix: CMatrix,
    inverse: CMatrix,
    cond: f64,
}

impl Similarity {
    /// Factors `matrix` (LU, partial pivoting) and caches the inverse.
    ///
    /// Fails for singular matrices, for a 2-norm condition number above
    /// [`MAX_CONDITION`], and when `S · S⁻¹` misses the identity by more than
    /// `1e-12 · dim` in Frobenius norm.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = matrix.dim();
        let cond = condition_number(&matrix);
        if !cond.is_finite() || cond > MAX_CONDITION {
            return Err(Error::IllConditioned {
                cond,
                limit: MAX_CONDITION,
            });
        }
        let inverse = matrix
            .to_nalgebra()
            .lu()
            .try_inverse()
            .map(|m| CMatrix::from_nalgebra(&m))
            .ok_or(Error::IllConditioned {
                cond: f64::INFINITY,
                limit: MAX_CONDITION,
            })?;
        let residual = (&matrix * &inverse).dist(&CMatrix::identity(n));
        if residual > 1e-12 * n as f64 {
            return Err(Error::InvalidMatrix(format!(
                "inverse residual {residual:e} exceeds {:e}",
                1e-12 * n as f64
            )));
        }
        Ok(Self {
            matrix,
            inverse,
            cond,
        })
    }

    /// A unitary similarity; the inverse is the adjoint.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        let n = u.dim();
        let adj = u.adjoint();
        let residual = (&adj * &u).dist(&CMatrix::identity(n));
        if residual > 1e-10 * n as f64 {
            return Err(Error::InvalidMatrix(format!(
                "matrix is not unitary (‖U*U − I‖ = {residual:e})"
            )));
        }
        Ok(Self {
            matrix: u,
            inverse: adj,
            cond: 1.0,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: CMatrix::identity(n),
            inverse: CMatrix::identity(n),
            cond: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &CMatrix {
        &self.inverse
    }

    /// 2-norm condition number of `S`.
    pub fn cond(&self) -> f64 {
        self.cond
    }

    /// The similarity `S⁻¹`.
    pub fn inverted(&self) -> Self {
        Self {
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
            cond: self.cond,
        }
    }

    /// `S⁻¹ A S`.
    pub fn conjugate_matrix(&self, a: &CMatrix) -> CMatrix {
        &(&self.inverse * a) * &self.matrix
    }
}

fn condition_number(m: &CMatrix) -> f64 {
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
