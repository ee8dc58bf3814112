//! Cotangent-lift constructions of integrable and b-integrable Hamiltonian systems,
//! with numerical checks of their structure: involutivity, independence, the Jacobi
//! identity, b-transversality, invariance of the critical hypersurface, action
//! coordinates from period integrals and recovery of the modular period.
//!
//! The numerics are generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases at
//! the crate root fix the scalar to `f64`.

pub mod actionangle;
pub mod catalog;
pub mod error;
pub mod expr;
pub mod flow;
pub mod lift;
pub mod linalg;
pub mod phase;
pub mod scalar;
pub mod sysfile;
pub mod systems;

pub use error::{Error, Result};
pub use expr::{BCovector, BFunction, Expr, Jet};
pub use scalar::Scalar;

pub type Jet64 = Jet<f64>;
pub type BCovector64 = BCovector<f64>;
