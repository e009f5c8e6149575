//! Numerical thresholds shared by every module.

use serde::{Deserialize, Serialize};

/// Every tolerance the library uses, in one place.
///
/// Problems carry their own copy so that a problem file can override the
/// defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// `|Z^T M Z - I|` bound accepted for a kernel basis.
    pub kernel_orthonormality: f64,
    /// Relative bound on `|A z|_inf / |A|_inf` for kernel columns.
    pub kernel_membership: f64,
    /// A column whose M-norm drops below this fraction of its original norm
    /// during orthogonalization is declared dependent.
    pub rank: f64,
    /// Relative bound on `|Z^T F| / |F|_2` for a consistent load.
    pub consistency: f64,
    /// Default relative residual for iterative solves.
    pub solver: f64,
    /// Relative pivot threshold of the dense symmetric factorization.
    pub singular_pivot: f64,
    /// Largest system handed to the dense factorization.
    pub dense_cutoff: usize,
    /// Rate fits ignore errors below `fit_floor_factor * solver`.
    pub fit_floor_factor: f64,
    /// Relative stopping tolerance of the eigenvalue estimators.
    pub eig: f64,
    /// Iteration cap of the eigenvalue estimators.
    pub eig_max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            kernel_orthonormality: 1e-12,
            kernel_membership: 1e-10,
            rank: 1e-10,
            consistency: 1e-10,
            solver: 1e-12,
            singular_pivot: 1e-14,
            dense_cutoff: 5000,
            fit_floor_factor: 100.0,
            eig: 1e-6,
            eig_max_iter: 10_000,
        }
    }
}
