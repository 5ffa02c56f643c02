//! Third-order PAMPA scheme in discontinuous-Galerkin form on unstructured
//! triangles, with bound-preserving and oscillation-eliminating limiting.
//!
//! The crate evolves, for every triangle, the cell average and the point
//! values at the three vertices and three edge midpoints (shared between
//! neighbours). Supported models are linear advection, the KPP rotating-wave
//! flux and the 2D compressible Euler equations.

// Index loops mirror the formulas; `!(x > y)` comparisons are meant to reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod boundary;
pub mod error;
pub mod io;
pub mod limiting;
pub mod mesh;
pub mod meshgen;
pub mod models;
pub mod spatial_ho;
pub mod spatial_lo;
pub mod timeloop;

pub use basis::{average_weights, check_basis, projection_matrix, AverageWeights, BasisCheck, EdgeRule, TriangleRule};
pub use error::{Error, Result};
pub use mesh::{DofMap, ElementGeometry, Mesh, SubTriangulation};
pub use models::{Euler, EulerDomain, Model, ScalarDomain, ScalarModel, VelocityField};
pub use timeloop::{Mode, Solution, Solver, SolverOptions, StageDiag, StepReport};


/// A point in the plane.
pub type Point = [f64; 2];
/// Conserved state with `M` components.
pub type State<const M: usize> = nalgebra::SVector<f64, M>;
/// `M`×`M` matrix acting on states.
pub type Mat<const M: usize> = nalgebra::SMatrix<f64, M, M>;
