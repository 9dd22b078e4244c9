//! Line integrals of demilinear maps and potential reconstruction.

pub mod beta;
pub mod constants;
pub mod integral;
pub mod path;
pub mod quadrature;
pub mod reconstruct;

pub use beta::{BetaEngine, PotentialConfig};
pub use constants::{pair_constants, triple_consistency, ConstantStore, PairConstant, TripleCheck};
pub use integral::{
    integral_free_check, line_integral, line_integral_in, path_independence_test, phi, plan_path,
    IntegralFreeReport, LineIntegral, PathIndependenceReport,
};
pub use path::SmoothPath;
pub use quadrature::{integrate, Quadrature, QuadratureConfig};
pub use reconstruct::{
    build_potential, similarity_check, validate_potential, ConstantsTable, OffsetReport,
    PotentialFunction, SimilarityReport, ValidationReport,
};
