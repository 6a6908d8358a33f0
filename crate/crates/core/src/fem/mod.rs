//! Piecewise-linear finite elements for the weighted Steklov problem in the plane.

pub mod assemble;
pub mod eigen;
pub mod mesh;
pub mod solve;
pub mod sparse;

pub use assemble::{assemble, mesh_integral, SteklovSystem};
pub use mesh::{triangulate, Mesh};
pub use solve::{
    convergence_study, harmonic_mean_check, solve_on_mesh, solve_steklov, ConvergenceStudy, SpectrumResult,
};
