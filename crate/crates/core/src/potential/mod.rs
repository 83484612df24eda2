//! Equilibrium-measure solver: boundary collocation for the logarithmic
//! energy problem on a compact scene.
//!
//! The chain is mesh -> kernel -> solve. Boundaries are sampled at nodes
//! carrying arclength weights; the log-kernel matrix gets a curvature-aware
//! diagonal; the linear system `K y = 1` yields the Robin constant and the
//! equilibrium weights, with a projected-gradient fallback when the direct
//! solve leaves the simplex.

mod kernel;
mod mesh;
mod solve;

pub use kernel::assemble_kernel;
pub use mesh::{discretize_boundary, BoundaryMesh, MeshComponentInfo, MeshNode};
pub use solve::{solve_equilibrium, solve_simplex_qp, EquilibriumSolution, SolverConfig};
