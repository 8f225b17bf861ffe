//! Finite element toolkit for elliptic problems on a 3D domain coupled to an
//! embedded 1D segment through Lagrange multipliers.
//!
//! The library builds structured tetrahedral meshes of the unit cube, assembles
//! the three saddle-point formulations of the coupled 3D-1D problem (multiplier
//! on the lateral surface of a tubular neighbourhood, multiplier on the 1D
//! segment, and a stabilized non-conforming variant with a piecewise-constant
//! multiplier on the cut cells), solves them directly or with preconditioned
//! MinRes, and measures errors against a manufactured solution, including
//! fractional Sobolev norms of the multiplier realized by spectral
//! decomposition.

pub mod bench;
pub mod coupling;
pub mod error;
pub mod fem;
pub mod fractional;
pub mod geometry;
pub mod saddle;
pub mod solve;

pub use error::{Error, Result};
