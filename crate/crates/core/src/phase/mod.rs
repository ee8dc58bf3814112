//! Phase-space charts, Poisson structures and the operations built on them:
//! brackets, Hamiltonian vector fields, the Jacobi identity and b-transversality.
//!
//! Sign conventions: `X_f = Pi(df, .)`, i.e. `X_f^j = sum_i Pi^{ij} d_i f`, which is
//! dual to `iota_{X_f} omega = -df` for `omega = sum dq ^ dp`. Everything near the
//! singular hypersurface is evaluated through the bivector in the b-frame.

mod chart;
mod pfaffian;
mod structure;
mod transversality;

pub use chart::{BaseCoord, CoordKind, PhaseChart};
pub use pfaffian::{pfaffian, pfaffian_values};
pub use structure::{BVector, PoissonStructure, StructureKind};
pub use transversality::{
    TransversalityReport, TransversalitySample, DEFAULT_DERIVATIVE_THRESHOLD, DEFAULT_ZERO_TOLERANCE,
};
