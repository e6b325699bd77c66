//! Exact computations with Lagrangians in hyperbolic ε-hermitian modules:
//! the classifying invariant of opposite triples, its Witt-group valued
//! Maslov cocycle, the signed-discriminant reduction, Kashiwara's index and
//! the comparison with Steinberg symbols.

pub mod arith;
pub mod cocycle;
pub mod error;
pub mod field;
pub mod forms;
pub mod lagrange;
pub mod matrix;
pub mod sampling;
pub mod symbols;
pub mod verify;
pub mod witt;

pub use error::{Error, Result};
pub use field::{FieldCtx, FieldKind, NormClassRep, Scalar, Sign};
pub use forms::FormMatrix;
pub use matrix::Matrix;
pub use witt::{SHatElement, WittClass};
pub use lagrange::{BasedLagrangian, HyperbolicSpace, Lagrangian, Unitary};
