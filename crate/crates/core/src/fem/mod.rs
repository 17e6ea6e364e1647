//! Continuous Lagrange finite element spaces on [`crate::mesh::Mesh`].

pub mod basis;
mod norms;
pub mod quadrature;
mod space;

pub use basis::Tabulation;
pub use norms::{errors, ErrorNorms};
pub use quadrature::{quadrature, QuadratureRule};
pub use space::{interpolate, interpolate_scalar, interpolate_vector, FieldFunction, FunctionSpace};
