use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::json::MatrixJson;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A square complex matrix stored row-major.
///
/// Values are immutable once built; every operation returns a new matrix.
/// Arithmetic operators panic on dimension mismatch, the same contract
/// `nalgebra` uses. Fallible, user-facing operations live on
/// [`MatrixTuple`](super::MatrixTuple) and return [`Result`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "MatrixJson", try_from = "MatrixJson")]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, ONE)
    }

    /// `c · I_dim`.
    pub fn scalar(dim: usize, c: Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c;
        }
        m
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &c) in entries.iter().enumerate() {
            m.data[i * entries.len() + i] = c;
        }
        m
    }

    /// Matrix unit `E_{ij}` (zero-based indices).
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.data[i * dim + j] = ONE;
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {dim}x{dim} matrix, found {}",
                dim * dim,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) is not finite",
                k / dim,
                k % dim
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(dim, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Block-diagonal matrix `A_1 ⊕ A_2 ⊕ …`.
    pub fn block_diag(blocks: &[&CMatrix]) -> Self {
        let dim: usize = blocks.iter().map(|b| b.dim).sum();
        let mut m = Self::zeros(dim);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim {
                let dst = (off + i) * dim + off;
                m.data[dst..dst + b.dim].copy_from_slice(&b.data[i * b.dim..(i + 1) * b.dim]);
            }
            off += b.dim;
        }
        m
    }

    /// Block permutation with square blocks of size `block`: block row `i`
    /// carries the identity in block column `perm[i]`, so that
    /// `(P A Pᵀ)` has block `(i, j)` equal to `A`'s block `(perm[i], perm[j])`.
    pub fn block_permutation(block: usize, perm: &[usize]) -> Self {
        let k = perm.len();
        let dim = block * k;
        let mut m = Self::zeros(dim);
        for (i, &p) in perm.iter().enumerate() {
            assert!(p < k, "block permutation index out of range");
            for r in 0..block {
                m.data[(i * block + r) * dim + p * block + r] = ONE;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        if self.dim == 1 {
            return self.data[0].norm();
        }
        self.singular_values().into_iter().fold(0.0, f64::max)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.to_nalgebra().singular_values().iter().copied().collect()
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn dist(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn matmul(&self, rhs: &CMatrix) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let orow = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let brow = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &CMatrix) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// Rectangular sub-block starting at `(row, col)`.
    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Block {
        assert!(row + rows <= self.dim && col + cols <= self.dim, "block out of range");
        let mut data = Vec::with_capacity(rows * cols);
        for i in row..row + rows {
            data.extend_from_slice(&self.data[i * self.dim + col..i * self.dim + col + cols]);
        }
        Block { rows, cols, data }
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "expected a square matrix");
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        self.add_scaled(ONE, rhs);
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, rhs: &CMatrix) {
        self.add_scaled(-ONE, rhs);
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Mul<Complex64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: Complex64) -> CMatrix {
        self.scale(rhs)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(-ONE)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for CMatrix {
            type Output = CMatrix;
            fn $f(self, rhs: CMatrix) -> CMatrix {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&CMatrix> for CMatrix {
            type Output = CMatrix;
            fn $f(self, rhs: &CMatrix) -> CMatrix {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// A rectangular block cut out of a square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Block {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    /// The block as a square matrix, if it is one.
    pub fn to_square(&self) -> Option<CMatrix> {
        (self.rows == self.cols).then(|| CMatrix {
            dim: self.rows,
            data: self.data.clone(),
        })
    }
}
