//! Representations of a poset: block matrices, subspace families, their
//! morphisms and decompositions.

pub mod decompose;
pub mod hom;
pub mod matrix_rep;
pub mod subspace;

pub use decompose::{
    are_isomorphic, decompose, decompose_rep, is_indecomposable, is_indecomposable_rep,
    is_quite_sincere, rep_isomorphism, Decomposition, EndStructure, RepDecomposition,
};
pub use hom::{
    el_end_dimension, el_hom_basis, is_rep_morphism, rep_end_dimension, rep_hom_basis, ElMorphism,
};
pub use matrix_rep::MatrixRep;
pub use subspace::{rho, SubspaceRep};
