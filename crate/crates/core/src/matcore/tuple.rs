use std::ops::{Add, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::json::TupleJson;
use super::matrix::Block;
use super::{CMatrix, Similarity};
use crate::error::{Error, Result};

/// A `g`-tuple of `n×n` complex matrices; `n` is the tuple's level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "TupleJson", try_from = "TupleJson")]
pub struct MatrixTuple {
    level: usize,
    comps: Vec<CMatrix>,
}

impl MatrixTuple {
    pub fn new(comps: Vec<CMatrix>) -> Result<Self> {
        let first = comps
            .first()
            .ok_or_else(|| Error::InvalidMatrix("a tuple needs at least one component".into()))?;
        let level = first.dim();
        if let Some(bad) = comps.iter().find(|c| c.dim() != level) {
            return Err(Error::LevelMismatch {
                expected: level,
                found: bad.dim(),
            });
        }
        Ok(Self { level, comps })
    }

    pub fn zeros(g: usize, level: usize) -> Self {
        assert!(g > 0, "tuple arity must be positive");
        Self {
            level,
            comps: vec![CMatrix::zeros(level); g],
        }
    }

    /// `(c_1 I_n, …, c_g I_n)`.
    pub fn scalars(level: usize, values: &[Complex64]) -> Self {
        assert!(!values.is_empty(), "tuple arity must be positive");
        Self {
            level,
            comps: values.iter().map(|&c| CMatrix::scalar(level, c)).collect(),
        }
    }

    pub fn g(&self) -> usize {
        self.comps.len()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn components(&self) -> &[CMatrix] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &CMatrix {
        &self.comps[i]
    }

    pub fn into_components(self) -> Vec<CMatrix> {
        self.comps
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| c.frobenius_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest operator norm among the components.
    pub fn op_norm(&self) -> f64 {
        self.comps.iter().map(CMatrix::op_norm).fold(0.0, f64::max)
    }

    pub fn dist(&self, other: &MatrixTuple) -> f64 {
        assert_eq!(self.g(), other.g(), "arity mismatch");
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.dist(b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(CMatrix::is_finite)
    }

    pub fn map(&self, f: impl FnMut(&CMatrix) -> CMatrix) -> Self {
        let comps: Vec<CMatrix> = self.comps.iter().map(f).collect();
        let level = comps[0].dim();
        Self { level, comps }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|m| m.scale(c))
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, c: Complex64, other: &MatrixTuple) -> Self {
        self.check_conforming(other).expect("tuples must conform");
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| {
                let mut m = a.clone();
                m.add_scaled(c, b);
                m
            })
            .collect();
        Self {
            level: self.level,
            comps,
        }
    }

    pub fn check_conforming(&self, other: &MatrixTuple) -> Result<()> {
        if self.g() != other.g() {
            return Err(Error::ArityMismatch {
                expected: self.g(),
                found: other.g(),
            });
        }
        if self.level != other.level {
            return Err(Error::LevelMismatch {
                expected: self.level,
                found: other.level,
            });
        }
        Ok(())
    }

    /// `X ⊕ Y`: componentwise block-diagonal stacking.
    pub fn direct_sum(&self, other: &MatrixTuple) -> Result<Self> {
        if self.g() != other.g() {
            return Err(Error::ArityMismatch {
                expected: self.g(),
                found: other.g(),
            });
        }
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| CMatrix::block_diag(&[a, b]))
            .collect();
        Ok(Self {
            level: self.level + other.level,
            comps,
        })
    }

    /// `S⁻¹ X S`, componentwise.
    pub fn conjugate(&self, s: &Similarity) -> Result<Self> {
        if s.dim() != self.level {
            return Err(Error::LevelMismatch {
                expected: self.level,
                found: s.dim(),
            });
        }
        Ok(self.map(|m| s.conjugate_matrix(m)))
    }

    /// Componentwise `a · X_i · b`.
    pub fn sandwich(&self, a: &CMatrix, b: &CMatrix) -> Self {
        self.map(|m| &(a * m) * b)
    }

    /// The doubled point `[[X_i, H_i], [0, X_i]]`.
    pub fn embed_upper(&self, dir: &MatrixTuple) -> Result<Self> {
        self.check_conforming(dir)?;
        let n = self.level;
        let comps = self
            .comps
            .iter()
            .zip(&dir.comps)
            .map(|(x, h)| {
                CMatrix::from_fn(2 * n, |i, j| match (i < n, j < n) {
                    (true, true) => x.get(i, j),
                    (false, false) => x.get(i - n, j - n),
                    (true, false) => h.get(i, j - n),
                    (false, true) => Complex64::new(0.0, 0.0),
                })
            })
            .collect();
        Ok(Self {
            level: 2 * n,
            comps,
        })
    }

    /// Partition into a grid of blocks with the given row/column sizes.
    pub fn extract_blocks(&self, sizes: &[usize]) -> Result<BlockGrid> {
        if sizes.iter().sum::<usize>() != self.level || sizes.contains(&0) {
            return Err(Error::BlockSizes {
                sizes: sizes.to_vec(),
                level: self.level,
            });
        }
        let offsets: Vec<usize> = sizes
            .iter()
            .scan(0, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        let blocks = (0..sizes.len())
            .map(|bi| {
                (0..sizes.len())
                    .map(|bj| {
                        self.comps
                            .iter()
                            .map(|m| m.block(offsets[bi], offsets[bj], sizes[bi], sizes[bj]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(BlockGrid {
            sizes: sizes.to_vec(),
            blocks,
        })
    }

    /// `(1, 2)` block of a tuple at even level `2n`, split as `[n, n]`.
    pub fn upper_right(&self) -> Result<Self> {
        if self.level % 2 != 0 {
            return Err(Error::BlockSizes {
                sizes: vec![self.level / 2, self.level - self.level / 2],
                level: self.level,
            });
        }
        let half = self.level / 2;
        self.extract_blocks(&[half, half])?.tuple(0, 1)
    }
}

impl Add for &MatrixTuple {
    type Output = MatrixTuple;
    fn add(self, rhs: &MatrixTuple) -> MatrixTuple {
        self.add_scaled(Complex64::new(1.0, 0.0), rhs)
    }
}

impl Sub for &MatrixTuple {
    type Output = MatrixTuple;
    fn sub(self, rhs: &MatrixTuple) -> MatrixTuple {
        self.add_scaled(Complex64::new(-1.0, 0.0), rhs)
    }
}

/// Block partition of a tuple; `blocks[i][j][c]` is block `(i, j)` of component `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockGrid {
    sizes: Vec<usize>,
    blocks: Vec<Vec<Vec<Block>>>,
}

impl BlockGrid {
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn block(&self, i: usize, j: usize) -> &[Block] {
        &self.blocks[i][j]
    }

    /// Block `(i, j)` as a tuple; only square blocks qualify.
    pub fn tuple(&self, i: usize, j: usize) -> Result<MatrixTuple> {
        let comps = self.blocks[i][j]
            .iter()
            .map(|b| {
                b.to_square().ok_or(Error::BlockSizes {
                    sizes: vec![b.rows(), b.cols()],
                    level: b.rows(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixTuple::new(comps)
    }

    pub fn assemble(&self) -> MatrixTuple {
        let dim: usize = self.sizes.iter().sum();
        let g = self.blocks[0][0].len();
        let mut starts = vec![0usize; self.sizes.len() + 1];
        for (k, s) in self.sizes.iter().enumerate() {
            starts[k + 1] = starts[k] + s;
        }
        let locate = |r: usize| starts.partition_point(|&o| o <= r) - 1;
        let comps = (0..g)
            .map(|c| {
                CMatrix::from_fn(dim, |r, col| {
                    let (bi, bj) = (locate(r), locate(col));
                    self.blocks[bi][bj][c].get(r - starts[bi], col - starts[bj])
                })
            })
            .collect();
        MatrixTuple { level: dim, comps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn one(m: CMatrix) -> MatrixTuple {
        MatrixTuple::new(vec![m]).unwrap()
    }

    #[test]
    fn direct_sum_of_scalars() {
        let x = MatrixTuple::scalars(1, &[c(2.0)]);
        let y = MatrixTuple::scalars(1, &[c(3.0)]);
        let s = x.direct_sum(&y).unwrap();
        assert_eq!(s.component(0), &CMatrix::diag(&[c(2.0), c(3.0)]));
    }

    #[test]
    fn direct_sum_is_associative() {
        let x = MatrixTuple::scalars(1, &[c(1.0), c(2.0)]);
        let y = MatrixTuple::new(vec![CMatrix::unit(2, 0, 1), CMatrix::unit(2, 1, 0)]).unwrap();
        let z = MatrixTuple::scalars(1, &[c(-1.0), c(5.0)]);
        let left = x.direct_sum(&y.direct_sum(&z).unwrap()).unwrap();
        let right = x.direct_sum(&y).unwrap().direct_sum(&z).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn direct_sum_embeds_units() {
        let x = one(CMatrix::unit(2, 0, 1));
        let y = MatrixTuple::zeros(1, 1);
        assert_eq!(x.direct_sum(&y).unwrap().component(0), &CMatrix::unit(3, 0, 1));
    }

    #[test]
    fn direct_sum_rejects_arity_mismatch() {
        let x = MatrixTuple::zeros(1, 1);
        let y = MatrixTuple::zeros(2, 1);
        assert!(matches!(x.direct_sum(&y), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn embed_upper_layout_and_round_trip() {
        let x = MatrixTuple::scalars(1, &[c(4.0)]);
        let h = MatrixTuple::scalars(1, &[c(7.0)]);
        let e = x.embed_upper(&h).unwrap();
        assert_eq!(
            e.component(0),
            &CMatrix::from_real(2, &[4.0, 7.0, 0.0, 4.0]).unwrap()
        );
        assert_eq!(e.upper_right().unwrap(), h);

        let z = MatrixTuple::zeros(1, 1);
        assert_eq!(x.embed_upper(&z).unwrap(), x.direct_sum(&x).unwrap());
        assert!(x.embed_upper(&MatrixTuple::zeros(1, 2)).is_err());
    }

    #[test]
    fn extract_and_reassemble() {
        let m = one(CMatrix::from_fn(5, |i, j| Complex64::new(i as f64, j as f64)));
        let grid = m.extract_blocks(&[2, 1, 2]).unwrap();
        assert_eq!(grid.block(0, 2)[0].rows(), 2);
        assert_eq!(grid.block(1, 0)[0].cols(), 2);
        assert_eq!(grid.assemble(), m);
        assert!(grid.tuple(0, 1).is_err());
        assert!(matches!(m.extract_blocks(&[2, 2]), Err(Error::BlockSizes { .. })));
    }
}
