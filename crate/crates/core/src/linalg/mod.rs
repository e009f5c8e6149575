//! Sparse storage and the handful of solvers the formulations need.
//!
//! Everything here works on plain `&[f64]` slices. Operators are anything
//! implementing [`LinearOperator`]; subspace restrictions are expressed with
//! a [`Projector`].

mod cg;
mod eig;
mod ldl;
mod sparse;

pub use cg::{cg_solve, cg_solve_monitored, CgOptions};
pub use eig::{extremal_eig, extremal_eig_dense_indefinite, EigEstimate, Extremal};
pub use ldl::{ldl_solve, DenseMatrix, LdlFactor};
pub use sparse::SparseMatrix;

use serde::{Deserialize, Serialize};

/// Outcome of an iterative or direct solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
    pub condition_estimate: Option<f64>,
}

/// A symmetric linear map `x -> y`.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// Writes `op(x)` into `y`. Both slices have length `dim()`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }
}

/// A (possibly oblique) projector `P` onto a subspace, together with its
/// transpose.
///
/// Iterates live in the range of `P`; residuals, which are dual objects, are
/// restricted with `P^T`.
pub trait Projector {
    fn project(&self, x: &[f64]) -> Vec<f64>;
    fn project_dual(&self, r: &[f64]) -> Vec<f64>;
}

impl<F> LinearOperator for (usize, F)
where
    F: Fn(&[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.1)(x, y)
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn scale(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}
