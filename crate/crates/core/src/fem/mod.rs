//! Pure Neumann Poisson problems `-Δu = f`, `∂u/∂n = g`, discretized with
//! conforming Lagrange elements.
//!
//! Without boundary conditions the stiffness matrix annihilates constants,
//! so every assembled problem has the one-dimensional kernel `K = span{1}`.
//! The load is compatible exactly when `∫f + ∮g = 0`.

mod assemble;
mod case;
mod mesh;
mod norms;
pub mod quadrature;

pub use assemble::{assemble, interpolate};
pub use case::{case_cosine_1d, case_cosine_2d, case_quadratic_1d, ManufacturedCase, ScalarField, VectorField};
pub use mesh::{build_interval_mesh, build_unit_square_mesh, Mesh, Point};
pub use norms::{error_norms, ErrorNorms};
