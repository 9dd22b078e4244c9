//! Free demilinear maps: maps `T(X, H)` that are free and linear in `H`.

mod map;
mod poly;

pub use map::{CurlReport, CurlWitness, DemiFn, DemilinearMap, Provenance};
pub use poly::{Decomposition, DemiPoly, DemiTerm, ExactnessReport, ExactnessWitness};
