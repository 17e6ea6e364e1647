//! Experiment orchestration: the manufactured-solution study, parameter
//! sweeps, heterogeneous cases, spectral reports and CSV output.

pub mod config;
pub mod experiments;
pub mod mms;
pub mod report;
pub mod solve;

pub use config::{parse_levels, SweepConfig};
pub use experiments::{amg_study, eig_report, heterogeneous, spectral_corners, static_point, sweep, HeterogeneousCase};
pub use mms::{MmsSolution, TimeDerivative};
pub use report::{table, write_csv, write_csv_file, Record, CSV_HEADER};
pub use solve::{
    backward_euler, convergence_study, field_errors, initial_state, rates, solve, step_rhs, ConvergenceRow, FieldErrors,
    SolverChoice, Trajectory,
};
