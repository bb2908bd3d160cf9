//! Exact Eilenberg–Moore Ext of free graded algebras.
//!
//! Given a Sullivan model `(ΛV, d)` or an Adams–Hilton model `(TV, d)`, this
//! crate builds an acyclic closure of the ground field, computes
//! `Ext_A(K, A)` degree by degree, its graded-commutative product, the
//! evaluation map, Gorenstein and formal-dimension verdicts, and
//! topological-complexity bounds built on kernels of n-fold multiplication.

pub mod algebra;
pub mod ext;
pub mod field;
pub mod hom;
pub mod linalg;
pub mod models;
pub mod parallel;
pub mod parse;
pub mod report;
pub mod resolution;
pub mod tcinv;
