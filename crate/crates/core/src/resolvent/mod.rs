//! Discretized free resolvent, the scattered-wave solves and the matrix B(z).

pub mod bmatrix;
pub mod grid;
pub mod kernel;
pub mod operator;
pub mod probe;

pub use bmatrix::{b_entry, BMatrix, EngineOptions, ResolventContext};
pub use grid::Grid;
pub use kernel::free_kernel;
pub use operator::{assemble_VR0, solve_phi, DiscretizedOperator, FactoredOperator, ModeVector, NystromRule, Wave};
pub use probe::{convergence_probe, ProbeReport, ProbeSample, Refinement};
