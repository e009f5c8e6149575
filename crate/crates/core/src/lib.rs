//! Solvers for quadratic minimization problems whose energy form has a
//! finite-dimensional kernel, and convergence studies for them.
//!
//! The energy `V(u) = 1/2 a(u, u) - l(u)` of such a problem is constant along
//! the kernel `K`, so minimizers are only unique up to kernel components. The
//! crate picks the representative orthogonal to `K` in four ways
//! ([`formulations`]), discretizes pure Neumann Poisson problems as canonical
//! instances ([`fem`]), and measures how the cheap, sparsity-preserving
//! `eta`-regularized solution approaches the exact one ([`harness`]).
//!
//! ```
//! use kerreg::formulations::{solve_perturbative, solve_projected, FormulationConfig};
//! use kerreg::linalg::SparseMatrix;
//! use kerreg::DiscreteProblem;
//!
//! let a = SparseMatrix::from_dense(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
//! let problem = DiscreteProblem::new(
//!     "toy", a, SparseMatrix::identity(2), vec![1.0, -1.0], &[vec![1.0, 1.0]],
//! )?;
//! let cfg = FormulationConfig::default();
//! let exact = solve_projected(&problem, &cfg)?;
//! let approx = solve_perturbative(&problem, &cfg.with_eta(0.1))?;
//! assert!((exact.u[0] - 0.5).abs() < 1e-12);
//! assert!((approx.u[0] - 1.0 / 2.1).abs() < 1e-12);
//! # Ok::<(), kerreg::Error>(())
//! ```
//!
//! The accompanying guide in `book/` walks through the mathematics; its code
//! listings are compiled and run as doc-tests of this crate.

pub mod config;
pub mod error;
pub mod fem;
pub mod formulations;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod problem;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use formulations::{Formulation, FormulationConfig, Solution};
pub use problem::{DiscreteProblem, KernelBasis};
