//! Surface models of skew-gentle algebras: dissections, presentations,
//! exact finite-dimensional algebra computations, orbifold covers, skew group
//! algebras and line-field invariants.

pub mod algebra;
pub mod cli;
pub mod covering;
pub mod equivariant;
pub mod error;
pub mod format;
pub mod linefield;
pub mod presentations;
pub mod surface;

pub use error::{Code, Diagnostic, Error, Result};
