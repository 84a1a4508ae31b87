//! Representations of finite posets over exact fields: finite-type
//! criteria, the differentiation algorithm, construction of indecomposables
//! and a brute-force classifier over small prime fields.

pub mod classifier;
pub mod critical;
pub mod derivation;
pub mod error;
pub mod field;
pub mod matrix;
pub mod poset;
pub mod rep;
pub mod tits;

pub use critical::{CriticalEmbedding, CriticalKind};
pub use error::{Error, Result};
pub use field::{Field, FieldSpec, Fp, Rationals};
pub use matrix::ExactMatrix;
pub use poset::Poset;
pub use rep::{MatrixRep, SubspaceRep};
pub use tits::DimensionVector;
