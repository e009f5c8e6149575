use super::{axpy, dot, norm2, LinearOperator, Projector, SolveDiagnostics};
use crate::error::{check_len, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Relative residual target, measured against `|b|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Bound on `|A|_inf`. When given, a solve whose true residual stalls
    /// above `tol` is still accepted if it lies within the rounding floor
    /// `10 sqrt(n) u |A| |x| / |b|`.
    pub operator_norm: Option<f64>,
}

impl CgOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        Self {
            tol,
            max_iter,
            operator_norm: None,
        }
    }

    pub fn with_operator_norm(mut self, norm: f64) -> Self {
        self.operator_norm = Some(norm);
        self
    }

    fn attainable(&self, n: usize, x: &[f64], b_norm: f64) -> f64 {
        self.operator_norm.map_or(0.0, |a| {
            10.0 * (n as f64).sqrt() * f64::EPSILON * a * norm2(x) / b_norm
        })
    }
}

/// Conjugate gradients for a symmetric operator.
///
/// With a projector `P`, the iteration solves the system restricted to the
/// range of `P`: every iterate satisfies `P x = x`, residuals are measured
/// as `|P^T (b - A x)|`, and `A` only needs to be positive definite on that
/// range. This is CG preconditioned by the singular operator `P P^T`, which
/// is how kernel deflation is realized without touching `A`.
///
/// Non-convergence is not an error: the best iterate is returned with
/// `converged == false`.
pub fn cg_solve(
    op: &dyn LinearOperator,
    b: &[f64],
    opts: &CgOptions,
    projector: Option<&dyn Projector>,
) -> Result<(Vec<f64>, SolveDiagnostics)> {
    cg_solve_monitored(op, b, opts, projector, &mut |_, _| {})
}

/// [`cg_solve`] with a callback receiving `(iteration, iterate)` after every
/// update of `x`.
pub fn cg_solve_monitored(
    op: &dyn LinearOperator,
    b: &[f64],
    opts: &CgOptions,
    projector: Option<&dyn Projector>,
    monitor: &mut dyn FnMut(usize, &[f64]),
) -> Result<(Vec<f64>, SolveDiagnostics)> {
    let n = op.dim();
    check_len(n, b.len())?;

    let restrict = |r: &[f64]| match projector {
        Some(p) => p.project_dual(r),
        None => r.to_vec(),
    };
    let precondition = |r: Vec<f64>| match projector {
        Some(p) => p.project(&r),
        None => r,
    };

    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveDiagnostics {
                iterations: 0,
                relative_residual: 0.0,
                converged: true,
                condition_estimate: None,
            },
        ));
    }

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut rr = restrict(&r);
    let mut rz = dot(&rr, &rr);
    let mut p = precondition(rr.clone());
    let mut q = vec![0.0; n];

    let mut best_x = x.clone();
    let mut best_res = rz.sqrt() / b_norm;
    let mut iterations = 0;
    let mut replacements = 0;
    let mut converged = false;

    loop {
        let res = rz.sqrt() / b_norm;
        if res <= opts.tol {
            // guard against drift of the recursive residual
            let mut true_r = b.to_vec();
            axpy(-1.0, &op.apply_vec(&x), &mut true_r);
            let true_rr = restrict(&true_r);
            let true_res = norm2(&true_rr) / b_norm;
            if true_res <= opts.tol || replacements >= 3 {
                converged = true_res <= opts.tol.max(opts.attainable(n, &x, b_norm));
                if true_res < best_res || converged {
                    best_x.clone_from(&x);
                }
                break;
            }
            replacements += 1;
            r = true_r;
            rr = true_rr;
            rz = dot(&rr, &rr);
            p = precondition(rr.clone());
            continue;
        }
        if iterations >= opts.max_iter {
            break;
        }

        op.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            // operator not positive definite on the search space
            break;
        }
        let alpha = rz / pq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        iterations += 1;
        monitor(iterations, &x);

        rr = restrict(&r);
        let rz_new = dot(&rr, &rr);
        let z = precondition(rr.clone());
        let beta = rz_new / rz;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
        rz = rz_new;

        let res = rz.sqrt() / b_norm;
        if res < best_res {
            best_res = res;
            best_x.clone_from(&x);
        }
    }

    if let Some(proj) = projector {
        best_x = proj.project(&best_x);
    }
    let mut final_r = b.to_vec();
    axpy(-1.0, &op.apply_vec(&best_x), &mut final_r);
    let relative_residual = norm2(&restrict(&final_r)) / b_norm;

    Ok((
        best_x,
        SolveDiagnostics {
            iterations,
            relative_residual,
            converged: converged || relative_residual <= opts.tol,
            condition_estimate: None,
        },
    ))
}
