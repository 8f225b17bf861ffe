//! Piecewise-linear finite element spaces and assembly.
//!
//! Matrices are assembled element by element into [`sparse::CooBuilder`]
//! accumulators. Dirichlet conditions are applied by symmetric elimination
//! that keeps the matrix size fixed, so unknown counts are comparable across
//! refinement levels and formulations.

pub mod assembly;
pub mod dirichlet;
pub mod interp;
pub mod quadrature;
pub mod sparse;
