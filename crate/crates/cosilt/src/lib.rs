//! Exact computations with cosilting complexes over finite acyclic quiver
//! algebras: representations, derived categories, recollement ladders,
//! gluing, and right mutation, all over exact scalar fields.

pub mod field;
pub mod linalg;
pub mod complex;
pub mod cosilting;
pub mod decomp;
pub mod derived;
pub mod minimal;
pub mod endo;
pub mod poly;
pub mod quiver;
pub mod recollement;
pub mod rep;

pub use field::{FieldSpec, Fp64, Rational, Scalar};
pub use linalg::Matrix;

/// Matrix over the default exact field.
pub type QMatrix = Matrix<Rational>;
/// Matrix over a prime field.
pub type FpMatrix = Matrix<Fp64>;
