//! The four ways of picking the zero-kernel-component minimizer.
//!
//! | formulation    | system                                   | parameter |
//! |----------------|------------------------------------------|-----------|
//! | projected      | `A u = F` on `{Z^T M u = 0}` (deflated CG) | none      |
//! | saddle point   | `[[A, MZ], [Z^T M, 0]] (u, c) = (F, 0)`    | none      |
//! | penalty        | `(A + 1/eps (MZ)(MZ)^T) u = F`             | `eps`     |
//! | perturbative   | `(A + eta M) u = F`                        | `eta`     |
//!
//! The first three return the same vector for every admissible parameter;
//! the perturbative solution differs from it by `O(eta)` while keeping the
//! sparsity pattern of `A` and `M`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    cg_solve, dot, extremal_eig, extremal_eig_dense_indefinite, norm2, sub, CgOptions,
    DenseMatrix, Extremal, LdlFactor, LinearOperator, SolveDiagnostics, SparseMatrix,
};
use crate::problem::DiscreteProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    Projected,
    SaddlePoint,
    Penalty,
    Perturbative,
}

impl Formulation {
    pub const ALL: [Formulation; 4] = [
        Formulation::Projected,
        Formulation::SaddlePoint,
        Formulation::Penalty,
        Formulation::Perturbative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formulation::Projected => "projected",
            Formulation::SaddlePoint => "saddle",
            Formulation::Penalty => "penalty",
            Formulation::Perturbative => "perturbative",
        }
    }
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormulationConfig {
    /// Relative residual requested from the solver.
    pub tol: f64,
    /// Iteration cap; `None` means `20 n`.
    pub max_iter: Option<usize>,
    /// Regularization weight of the perturbative formulation.
    pub eta: f64,
    /// Penalty parameter.
    pub eps: f64,
    pub reject_inconsistent: bool,
}

impl Default for FormulationConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: None,
            eta: 1e-6,
            eps: 1e-6,
            reject_inconsistent: true,
        }
    }
}

impl FormulationConfig {
    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn cg_options(&self, n: usize, operator_norm: f64) -> CgOptions {
        CgOptions::new(self.tol, self.max_iter.unwrap_or(20 * n.max(1)))
            .with_operator_norm(operator_norm)
    }

    fn validate(&self, formulation: Formulation) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", format!("must be positive, got {}", self.tol)));
        }
        match formulation {
            Formulation::Perturbative if !(self.eta > 0.0) => {
                Err(Error::invalid("eta", format!("must be positive, got {}", self.eta)))
            }
            Formulation::Penalty if !(self.eps > 0.0) => {
                Err(Error::invalid("eps", format!("must be positive, got {}", self.eps)))
            }
            _ => Ok(()),
        }
    }
}

/// A solution vector with its solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub u: Vec<f64>,
    pub formulation: Formulation,
    /// `eta` or `eps`; zero for the parameter-free formulations.
    pub eta_or_eps: f64,
    pub iterations: usize,
    /// Final relative residual.
    pub residual: f64,
    /// `V(u)`.
    pub value: f64,
    /// Kernel coordinates `c` of the multiplier `lambda = Z c` (saddle point
    /// only).
    pub multiplier: Option<Vec<f64>>,
    /// Whether the load satisfied the consistency check. The perturbative
    /// solver runs on inconsistent data, but its kernel-vanishing property
    /// does not hold there.
    pub consistent: bool,
}

fn require_consistent(problem: &DiscreteProblem, cfg: &FormulationConfig) -> Result<bool> {
    match problem.first_inconsistency() {
        Some((component, value, tolerance)) if cfg.reject_inconsistent => {
            Err(Error::InconsistentLoad {
                component,
                value,
                tolerance,
            })
        }
        Some(_) => Ok(false),
        None => Ok(true),
    }
}

fn finish(
    problem: &DiscreteProblem,
    formulation: Formulation,
    eta_or_eps: f64,
    u: Vec<f64>,
    diag: SolveDiagnostics,
    solver: &'static str,
    consistent: bool,
) -> Result<Solution> {
    if !diag.converged {
        return Err(Error::NotConverged {
            solver,
            diagnostics: diag,
        });
    }
    let value = problem.energy_value(&u)?;
    Ok(Solution {
        u,
        formulation,
        eta_or_eps,
        iterations: diag.iterations,
        residual: diag.relative_residual,
        value,
        multiplier: None,
        consistent,
    })
}

/// Minimizes `V` over the M-orthogonal complement of the kernel with
/// deflated CG. This is the reference solution `u0`.
pub fn solve_projected(problem: &DiscreteProblem, cfg: &FormulationConfig) -> Result<Solution> {
    cfg.validate(Formulation::Projected)?;
    let consistent = require_consistent(problem, cfg)?;
    let proj = problem.perp_projector();
    let (u, diag) = cg_solve(
        problem.stiffness(),
        problem.load(),
        &cfg.cg_options(problem.n(), problem.stiffness().norm_inf()),
        Some(&proj),
    )?;
    finish(problem, Formulation::Projected, 0.0, u, diag, "projected CG", consistent)
}

/// The bordered matrix `[[A, MZ], [Z^T M, 0]]` as a dense matrix.
pub fn bordered_matrix(problem: &DiscreteProblem) -> Result<DenseMatrix> {
    let n = problem.n();
    let m = problem.kernel().dim();
    let size = n + m;
    let cutoff = problem.tolerances().dense_cutoff;
    if size > cutoff {
        return Err(Error::TooLargeForDense { size, cutoff });
    }
    let mut k = DenseMatrix::zeros(size);
    for (i, j, v) in problem.stiffness().triplets() {
        k.set(i, j, v);
    }
    for (j, mz) in problem.mass_kernel().iter().enumerate() {
        for (i, &v) in mz.iter().enumerate() {
            k.set(i, n + j, v);
            k.set(n + j, i, v);
        }
    }
    Ok(k)
}

/// Lagrange-multiplier formulation, solved directly with a symmetric
/// indefinite factorization.
pub fn solve_saddle(problem: &DiscreteProblem, cfg: &FormulationConfig) -> Result<Solution> {
    cfg.validate(Formulation::SaddlePoint)?;
    let consistent = require_consistent(problem, cfg)?;
    let n = problem.n();
    let k = bordered_matrix(problem)?;
    let mut rhs = problem.load().to_vec();
    rhs.resize(k.dim(), 0.0);
    let factor = LdlFactor::new(&k, problem.tolerances().singular_pivot)?;
    let x = factor.solve(&rhs)?;
    let b_norm = norm2(&rhs);
    let residual = if b_norm == 0.0 {
        0.0
    } else {
        norm2(&sub(&k.matvec(&x), &rhs)) / b_norm
    };
    let u = x[..n].to_vec();
    let multiplier = x[n..].to_vec();
    let value = problem.energy_value(&u)?;
    Ok(Solution {
        u,
        formulation: Formulation::SaddlePoint,
        eta_or_eps: 0.0,
        iterations: 1,
        residual,
        value,
        multiplier: Some(multiplier),
        consistent,
    })
}

/// `x -> A x + 1/eps (MZ)(MZ)^T x`, applied without forming the rank-m
/// update.
pub struct PenaltyOperator<'a> {
    stiffness: &'a SparseMatrix,
    mass_kernel: &'a [Vec<f64>],
    inv_eps: f64,
}

impl<'a> PenaltyOperator<'a> {
    pub fn new(problem: &'a DiscreteProblem, eps: f64) -> Self {
        Self {
            stiffness: problem.stiffness(),
            mass_kernel: problem.mass_kernel(),
            inv_eps: 1.0 / eps,
        }
    }
}

impl PenaltyOperator<'_> {
    /// `|A|_inf + 1/eps max_i sum_j |(MZ MZ^T)_ij|`, an upper bound on the
    /// infinity norm.
    pub fn norm_inf_bound(&self) -> f64 {
        let mut rows = vec![0.0; self.dim()];
        for mz in self.mass_kernel {
            let total: f64 = mz.iter().map(|v| v.abs()).sum();
            for (r, m) in rows.iter_mut().zip(mz) {
                *r += m.abs() * total;
            }
        }
        self.stiffness.norm_inf() + self.inv_eps * rows.iter().cloned().fold(0.0, f64::max)
    }
}

impl LinearOperator for PenaltyOperator<'_> {
    fn dim(&self) -> usize {
        self.stiffness.n_rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.stiffness.apply(x, y);
        for mz in self.mass_kernel {
            let c = self.inv_eps * dot(mz, x);
            for (yi, m) in y.iter_mut().zip(mz) {
                *yi += c * m;
            }
        }
    }
}

/// Penalizes `1/(2 eps) |Pi_par u|_L^2`; solved with plain CG.
pub fn solve_penalty(problem: &DiscreteProblem, cfg: &FormulationConfig) -> Result<Solution> {
    cfg.validate(Formulation::Penalty)?;
    let consistent = require_consistent(problem, cfg)?;
    let op = PenaltyOperator::new(problem, cfg.eps);
    let opts = cfg.cg_options(problem.n(), op.norm_inf_bound());
    let (u, diag) = cg_solve(&op, problem.load(), &opts, None)?;
    finish(problem, Formulation::Penalty, cfg.eps, u, diag, "penalty CG", consistent)
}

/// `A + eta M`, same pattern as the union of both.
pub fn perturbative_matrix(problem: &DiscreteProblem, eta: f64) -> Result<SparseMatrix> {
    problem.stiffness().add_scaled(eta, problem.mass())
}

/// Adds `eta/2 |u|_L^2` to the energy and minimizes over the whole space.
pub fn solve_perturbative(problem: &DiscreteProblem, cfg: &FormulationConfig) -> Result<Solution> {
    cfg.validate(Formulation::Perturbative)?;
    let consistent = problem.is_consistent();
    let system = perturbative_matrix(problem, cfg.eta)?;
    let opts = cfg.cg_options(problem.n(), system.norm_inf());
    let (u, diag) = cg_solve(&system, problem.load(), &opts, None)?;
    finish(problem, Formulation::Perturbative, cfg.eta, u, diag, "perturbative CG", consistent)
}

/// Dispatches on `formulation`, taking `eta`/`eps` from `cfg`.
pub fn solve(
    problem: &DiscreteProblem,
    formulation: Formulation,
    cfg: &FormulationConfig,
) -> Result<Solution> {
    match formulation {
        Formulation::Projected => solve_projected(problem, cfg),
        Formulation::SaddlePoint => solve_saddle(problem, cfg),
        Formulation::Penalty => solve_penalty(problem, cfg),
        Formulation::Perturbative => solve_perturbative(problem, cfg),
    }
}

/// Nonzero count of each formulation's system matrix.
///
/// The penalty count is that of the formed matrix `A + 1/eps (MZ)(MZ)^T`
/// even though the solver never forms it.
pub fn system_nnz(problem: &DiscreteProblem, formulation: Formulation) -> usize {
    let a = problem.stiffness();
    match formulation {
        Formulation::Projected => a.nnz(),
        Formulation::SaddlePoint => {
            let border: usize = problem
                .mass_kernel()
                .iter()
                .map(|mz| mz.iter().filter(|v| **v != 0.0).count())
                .sum();
            a.nnz() + 2 * border
        }
        Formulation::Penalty => {
            let n = problem.n();
            let mut support = vec![false; n];
            for mz in problem.mass_kernel() {
                for (i, v) in mz.iter().enumerate() {
                    support[i] |= *v != 0.0;
                }
            }
            let s = support.iter().filter(|b| **b).count();
            let inside = a.triplets().filter(|&(i, j, _)| support[i] && support[j]).count();
            a.nnz() - inside + s * s
        }
        Formulation::Perturbative => {
            // pattern union; eta does not matter structurally
            a.add_scaled(1.0, problem.mass()).map(|s| s.nnz()).unwrap_or(0)
        }
    }
}

/// Number of rows of each formulation's system.
pub fn system_size(problem: &DiscreteProblem, formulation: Formulation) -> usize {
    match formulation {
        Formulation::SaddlePoint => problem.n() + problem.kernel().dim(),
        _ => problem.n(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionEstimate {
    /// Largest eigenvalue (largest magnitude for the indefinite system).
    pub largest: f64,
    /// Smallest eigenvalue (smallest magnitude for the indefinite system;
    /// smallest nonzero for the projected system).
    pub smallest: f64,
    pub condition: f64,
    pub converged: bool,
}

struct DenseOp<'a>(&'a DenseMatrix);

impl LinearOperator for DenseOp<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(&self.0.matvec(x));
    }
}

/// Spectral condition estimate of a formulation's system matrix; `param` is
/// `eta` or `eps` where relevant.
pub fn condition_estimate(
    problem: &DiscreteProblem,
    formulation: Formulation,
    param: f64,
) -> Result<ConditionEstimate> {
    let tol = problem.tolerances().eig;
    let max_iter = problem.tolerances().eig_max_iter;
    let (hi, lo) = match formulation {
        Formulation::Projected => {
            let proj = problem.perp_projector();
            let a = problem.stiffness();
            (
                extremal_eig(a, Extremal::Largest, None, Some(&proj), tol, max_iter),
                extremal_eig(a, Extremal::Smallest, None, Some(&proj), tol, max_iter),
            )
        }
        Formulation::SaddlePoint => {
            let k = bordered_matrix(problem)?;
            let factor = LdlFactor::new(&k, problem.tolerances().singular_pivot)?;
            let op = DenseOp(&k);
            (
                extremal_eig(&op, Extremal::Largest, None, None, tol, max_iter),
                extremal_eig_dense_indefinite(&op, &factor, tol, max_iter),
            )
        }
        Formulation::Penalty => {
            if !(param > 0.0) {
                return Err(Error::invalid("eps", format!("must be positive, got {param}")));
            }
            let op = PenaltyOperator::new(problem, param);
            (
                extremal_eig(&op, Extremal::Largest, None, None, tol, max_iter),
                extremal_eig(&op, Extremal::Smallest, None, None, tol, max_iter),
            )
        }
        Formulation::Perturbative => {
            if !(param > 0.0) {
                return Err(Error::invalid("eta", format!("must be positive, got {param}")));
            }
            let s = perturbative_matrix(problem, param)?;
            (
                extremal_eig(&s, Extremal::Largest, None, None, tol, max_iter),
                extremal_eig(&s, Extremal::Smallest, None, None, tol, max_iter),
            )
        }
    };
    Ok(ConditionEstimate {
        largest: hi.value,
        smallest: lo.value,
        condition: hi.value.abs() / lo.value.abs(),
        converged: hi.converged && lo.converged,
    })
}

/// One formulation's line of a [`ComparisonReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub formulation: Formulation,
    /// `eta` or `eps`, zero otherwise.
    pub parameter: f64,
    /// System size.
    pub n: usize,
    pub nnz: usize,
    pub iterations: usize,
    pub residual: f64,
    /// `|u - u0|_H` against the projected solution.
    pub h_error_vs_projected: f64,
    pub condition_estimate: Option<f64>,
    /// `|Z^T M u|`
    pub kernel_component: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub label: String,
    pub rows: Vec<ComparisonRow>,
    pub reference_h_norm: f64,
    /// Largest `|u_i - u_j|_H` among the parameter-free and penalty solutions.
    pub max_pairwise_difference: f64,
    /// `max_pairwise_difference <= 1e-8 |u0|_H`.
    pub equivalent: bool,
    pub perturbative_error: f64,
    /// Empirical `|u_eta - u0|_H / eta`.
    pub perturbative_constant: f64,
}

pub const EQUIVALENCE_TOLERANCE: f64 = 1e-8;

impl ComparisonReport {
    pub const CSV_HEADER: &'static str =
        "formulation,n,nnz,iterations,residual,h_error_vs_projected,condition_estimate";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let cond = r
                .condition_estimate
                .map_or_else(|| "NA".to_string(), |c| format!("{c:.16e}"));
            out.push_str(&format!(
                "{},{},{},{},{:.16e},{:.16e},{}\n",
                r.formulation, r.n, r.nnz, r.iterations, r.residual, r.h_error_vs_projected, cond
            ));
        }
        out
    }
}

/// Runs every formulation (one penalty solve per entry of `eps`) and
/// compares each against the projected reference.
pub fn compare_formulations(
    problem: &DiscreteProblem,
    eta: f64,
    eps: &[f64],
    cfg: &FormulationConfig,
    estimate_conditions: bool,
) -> Result<ComparisonReport> {
    let label = |f: Formulation| f.name();
    let wrap = |f: Formulation| {
        move |e: Error| Error::Formulation {
            formulation: label(f),
            source: Box::new(e),
        }
    };
    if !problem.is_consistent() {
        let (component, value, tolerance) = problem.first_inconsistency().unwrap();
        return Err(Error::InconsistentLoad {
            component,
            value,
            tolerance,
        });
    }

    let mut solutions = vec![
        solve_projected(problem, cfg).map_err(wrap(Formulation::Projected))?,
        solve_saddle(problem, cfg).map_err(wrap(Formulation::SaddlePoint))?,
    ];
    for &e in eps {
        solutions.push(
            solve_penalty(problem, &cfg.with_eps(e)).map_err(wrap(Formulation::Penalty))?,
        );
    }
    solutions.push(
        solve_perturbative(problem, &cfg.with_eta(eta)).map_err(wrap(Formulation::Perturbative))?,
    );

    let u0 = solutions[0].u.clone();
    let reference_h_norm = problem.h_norm(&u0)?;
    let mut rows = Vec::with_capacity(solutions.len());
    for s in &solutions {
        let condition_estimate = if estimate_conditions {
            Some(condition_estimate(problem, s.formulation, s.eta_or_eps)?.condition)
        } else {
            None
        };
        rows.push(ComparisonRow {
            formulation: s.formulation,
            parameter: s.eta_or_eps,
            n: system_size(problem, s.formulation),
            nnz: system_nnz(problem, s.formulation),
            iterations: s.iterations,
            residual: s.residual,
            h_error_vs_projected: problem.h_norm(&sub(&s.u, &u0))?,
            condition_estimate,
            kernel_component: norm2(&problem.kernel_coordinates(&s.u)),
        });
    }

    let exact: Vec<&Solution> = solutions
        .iter()
        .filter(|s| s.formulation != Formulation::Perturbative)
        .collect();
    let mut max_pairwise_difference: f64 = 0.0;
    for (i, a) in exact.iter().enumerate() {
        for b in &exact[i + 1..] {
            max_pairwise_difference = max_pairwise_difference.max(problem.h_norm(&sub(&a.u, &b.u))?);
        }
    }
    let perturbative_error = rows.last().map_or(0.0, |r| r.h_error_vs_projected);

    Ok(ComparisonReport {
        label: problem.label().to_string(),
        rows,
        reference_h_norm,
        max_pairwise_difference,
        equivalent: max_pairwise_difference <= EQUIVALENCE_TOLERANCE * reference_h_norm,
        perturbative_error,
        perturbative_constant: perturbative_error / eta,
    })
}
