//! Extremal eigenvalue estimates for conditioning reports.

use super::{axpy, cg_solve, dot, norm2, CgOptions, LdlFactor, LinearOperator, Projector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremal {
    Largest,
    Smallest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigEstimate {
    /// Rayleigh quotient of the final iterate.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn start_vector(n: usize, projector: Option<&dyn Projector>) -> Vec<f64> {
    // fixed, non-symmetric start so results are reproducible
    let x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * (1.7 * i as f64 + 0.3).sin())
        .collect();
    let x = match projector {
        Some(p) => p.project(&x),
        None => x,
    };
    let nrm = norm2(&x);
    x.iter().map(|v| v / nrm).collect()
}

/// Twice the Rayleigh quotient after a few power steps on `op - shift I`,
/// a cheap stand-in for the operator norm in the inner solves' rounding
/// floor.
fn norm_estimate(op: &dyn LinearOperator, projector: Option<&dyn Projector>, shift: f64) -> f64 {
    let mut x = start_vector(op.dim(), projector);
    let mut value = 0.0;
    for _ in 0..30 {
        let mut y = op.apply_vec(&x);
        axpy(-shift, &x, &mut y);
        if let Some(p) = projector {
            y = p.project(&y);
        }
        let ny = norm2(&y);
        if ny == 0.0 {
            break;
        }
        value = ny;
        x = y.iter().map(|v| v / ny).collect();
    }
    2.0 * value
}

fn rayleigh(op: &dyn LinearOperator, x: &[f64]) -> f64 {
    dot(x, &op.apply_vec(x)) / dot(x, x)
}

/// Largest eigenvalue by power iteration, smallest by inverse iteration with
/// inner CG solves on `op - shift I`.
///
/// With a projector the iteration is restricted to its range, which is how
/// the smallest eigenvalue of a singular operator on the complement of its
/// kernel is estimated. Iteration stops when the Rayleigh quotient changes
/// by less than `tol` relative.
pub fn extremal_eig(
    op: &dyn LinearOperator,
    which: Extremal,
    shift: Option<f64>,
    projector: Option<&dyn Projector>,
    tol: f64,
    max_iter: usize,
) -> EigEstimate {
    let n = op.dim();
    let mut x = start_vector(n, projector);
    let mut lambda = rayleigh(op, &x);
    let shift = shift.unwrap_or(0.0);
    let mut inner = CgOptions::new(1e-10, 20 * n.max(1));
    if which == Extremal::Smallest {
        inner = inner.with_operator_norm(norm_estimate(op, projector, shift));
    }
    let mut inner_ok = true;

    for it in 1..=max_iter {
        let y = match which {
            Extremal::Largest => {
                let y = op.apply_vec(&x);
                match projector {
                    Some(p) => p.project(&y),
                    None => y,
                }
            }
            Extremal::Smallest => {
                let shifted = (n, |v: &[f64], out: &mut [f64]| {
                    op.apply(v, out);
                    if shift != 0.0 {
                        for (o, vi) in out.iter_mut().zip(v) {
                            *o -= shift * vi;
                        }
                    }
                });
                let rhs = match projector {
                    Some(p) => p.project_dual(&x),
                    None => x.clone(),
                };
                let (y, diag) =
                    cg_solve(&shifted, &rhs, &inner, projector).expect("dimensions agree");
                inner_ok &= diag.converged;
                y
            }
        };
        let ny = norm2(&y);
        if ny == 0.0 {
            return EigEstimate {
                value: 0.0,
                iterations: it,
                converged: true,
            };
        }
        x = y.iter().map(|v| v / ny).collect();
        let next = rayleigh(op, &x);
        let done = (next - lambda).abs() <= tol * next.abs();
        lambda = next;
        if done {
            return EigEstimate {
                value: lambda,
                iterations: it,
                converged: inner_ok,
            };
        }
    }
    EigEstimate {
        value: lambda,
        iterations: max_iter,
        converged: false,
    }
}

/// Eigenvalue of smallest magnitude of a symmetric indefinite operator, by
/// inverse iteration with a prefactored dense LDL^T.
pub fn extremal_eig_dense_indefinite(
    op: &dyn LinearOperator,
    factor: &LdlFactor,
    tol: f64,
    max_iter: usize,
) -> EigEstimate {
    let n = op.dim();
    let mut x = start_vector(n, None);
    let mut lambda = rayleigh(op, &x);
    for it in 1..=max_iter {
        let y = factor.solve(&x).expect("dimensions agree");
        let ny = norm2(&y);
        x = y.iter().map(|v| v / ny).collect();
        let next = rayleigh(op, &x);
        let done = (next - lambda).abs() <= tol * next.abs();
        lambda = next;
        if done {
            return EigEstimate {
                value: lambda,
                iterations: it,
                converged: true,
            };
        }
    }
    EigEstimate {
        value: lambda,
        iterations: max_iter,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseMatrix, SparseMatrix};

    #[test]
    fn diagonal_extremes() {
        let a = SparseMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let hi = extremal_eig(&a, Extremal::Largest, None, None, 1e-6, 10_000);
        let lo = extremal_eig(&a, Extremal::Smallest, None, None, 1e-6, 10_000);
        assert!((hi.value - 3.0).abs() < 1e-5, "{hi:?}");
        assert!((lo.value - 1.0).abs() < 1e-5, "{lo:?}");
        assert!(hi.converged && lo.converged);
    }

    #[test]
    fn neumann_toy_largest() {
        let a = SparseMatrix::from_dense(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let hi = extremal_eig(&a, Extremal::Largest, None, None, 1e-6, 10_000);
        assert!((hi.value - 2.0).abs() < 1e-5);
    }

    #[test]
    fn shifted_inverse_iteration() {
        let a = SparseMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let lo = extremal_eig(&a, Extremal::Smallest, Some(0.5), None, 1e-8, 10_000);
        assert!((lo.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn indefinite_smallest_magnitude() {
        let d = DenseMatrix::from_rows(&[
            vec![4.0, 0.0, 0.0],
            vec![0.0, -0.5, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        let op = SparseMatrix::from_dense(&[
            vec![4.0, 0.0, 0.0],
            vec![0.0, -0.5, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        let f = LdlFactor::new(&d, 1e-14).unwrap();
        let e = extremal_eig_dense_indefinite(&op, &f, 1e-10, 1000);
        assert!((e.value + 0.5).abs() < 1e-8);
    }
}
