//! Wire encoding of matrices and tuples.
//!
//! Matrix: `{ "n": int, "re": [row-major doubles], "im": [row-major doubles] }`.
//! Tuple: `{ "g": int, "components": [matrix, …] }`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMatrix, MatrixTuple};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TupleJson {
    pub g: usize,
    pub components: Vec<MatrixJson>,
}

impl From<CMatrix> for MatrixJson {
    fn from(m: CMatrix) -> Self {
        Self {
            n: m.dim(),
            re: m.as_slice().iter().map(|z| z.re).collect(),
            im: m.as_slice().iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(Error::InvalidMatrix(format!(
                "re has {} entries but im has {}",
                j.re.len(),
                j.im.len()
            )));
        }
        let data = j
            .re
            .iter()
            .zip(&j.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        CMatrix::from_row_major(j.n, data)
    }
}

impl From<MatrixTuple> for TupleJson {
    fn from(t: MatrixTuple) -> Self {
        Self {
            g: t.g(),
            components: t.into_components().into_iter().map(MatrixJson::from).collect(),
        }
    }
}

impl TryFrom<TupleJson> for MatrixTuple {
    type Error = Error;

    fn try_from(j: TupleJson) -> Result<Self> {
        if j.components.len() != j.g {
            return Err(Error::ArityMismatch {
                expected: j.g,
                found: j.components.len(),
            });
        }
        let comps = j
            .components
            .into_iter()
            .map(CMatrix::try_from)
            .collect::<Result<Vec<_>>>()?;
        MatrixTuple::new(comps)
    }
}

/// Serializes complex scalars as `[re, im]` pairs.
pub(crate) fn serialize_complex_vec<S: serde::Serializer>(
    v: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| [z.re, z.im]))
}
