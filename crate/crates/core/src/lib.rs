//! Finite element discretization, block preconditioners and MinRes for the
//! linear four-field thermo-poroelasticity problem on the unit square.

pub mod amg;
pub mod assembly;
pub mod driver;
pub mod error;
pub mod fem;
pub mod krylov;
pub mod mesh;
pub mod precond;
pub mod sparse;

pub use error::{Error, Result};
