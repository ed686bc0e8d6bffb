//! High-order streamline-diffusion finite elements for the singularly
//! perturbed convection-diffusion problem
//! `-eps Lap(u) - b u_x + c u = f` on the unit square, on layer-adapted
//! S-type tensor meshes (Shishkin and Bakhvalov-Shishkin).
//!
//! The crate provides the mesh machinery, a nodal `Q_p` space on
//! Gauss-Lobatto points, three interpolation operators, the stabilized
//! assembly, a banded direct solver, two superconvergent postprocessing
//! lifts onto 2x2 macro cells, energy-norm error computation, and a
//! convergence-study harness that reproduces the published tables for the
//! manufactured layered solution.

pub mod assemble;
mod dense;
pub mod error;
pub mod interp;
pub mod mesh;
pub mod norms;
pub mod post;
pub mod problem;
pub mod quad;
pub mod space;
pub mod sparse;
pub mod study;
pub mod verify;

pub use error::{Error, Result, SolveError};
pub use mesh::{
    build_macro_mesh, build_stype_mesh, build_stype_mesh_with, mesh_ratio_q, MacroMesh,
    MeshGeneratingFunction, MeshKind, SubdomainId, TensorMesh,
};
pub use problem::{model_problem, ExactSolution, Factor1D, ProblemData};
pub use space::{build_space, FEFunction, FESpace};
pub use study::{run_study, Column, Method, ReportFormat, StudyConfig, StudyReport};
