//! Parameters, element assembly of the four-field operator and load
//! vectors, and Dirichlet elimination.

pub mod forms;
mod params;
mod system;

pub use params::{lame_from_young_poisson, CoefficientField, DerivedCoefficients, ParameterSet};
pub use system::{
    BlockLayout, BlockSystem, CellCoefficients, Field, NoSources, OperatorBlocks, Sources, Spaces, RHS_QUADRATURE,
};
