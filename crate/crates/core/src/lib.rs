//! Computational free analysis on tuples of complex matrices.
//!
//! The crate differentiates free (noncommutative) maps and reconstructs
//! potentials of free-curl-free demilinear maps. Two routes are provided
//! throughout:
//!
//! * a symbolic route for noncommutative polynomials ([`ncpoly`], [`demilinear`]),
//!   where derivatives and antiderivatives are exact coefficient manipulations;
//! * a numerical route for black-box maps ([`freecalc`], [`potential`]), built on
//!   block upper-triangular evaluation and matrix-valued line integrals
//!   averaged over the unitary group.
//!
//! Each route serves as an oracle for the other.

pub mod demilinear;
pub mod domain;
pub mod error;
pub mod freecalc;
pub mod matcore;
pub mod ncpoly;
pub mod potential;
pub mod report;
pub mod rng;

pub use demilinear::{DemiPoly, DemiTerm, DemilinearMap};
pub use domain::FreeDomain;
pub use error::{Error, Result};
pub use freecalc::FreeMap;
pub use matcore::{CMatrix, MatrixTuple, Similarity};
pub use ncpoly::{NcPoly, Word};
pub use num_complex::Complex64;
pub use rng::SeedStream;
