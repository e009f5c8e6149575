use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{FittedRates, SweepMetadata, SweepReport, SweepRow};
use super::{fit_rate, RateFit};
use crate::error::{Error, Result};
use crate::fem::{assemble, build_interval_mesh, build_unit_square_mesh, error_norms, ManufacturedCase, Mesh};
use crate::formulations::{solve_perturbative, solve_projected, FormulationConfig, Solution};
use crate::linalg::{cg_solve, dot, norm_inf, sub, CgOptions};
use crate::problem::DiscreteProblem;

/// How `eta` is chosen on each mesh of an h-sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaRule {
    Fixed(f64),
    /// `eta = c h^k`.
    Coupled { c: f64, k: f64 },
}

impl EtaRule {
    pub fn eta(&self, h: f64) -> f64 {
        match *self {
            EtaRule::Fixed(eta) => eta,
            EtaRule::Coupled { c, k } => c * h.powf(k),
        }
    }
}

impl fmt::Display for EtaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtaRule::Fixed(eta) => write!(f, "fixed eta={eta:e}"),
            EtaRule::Coupled { c, k } => write!(f, "coupled c={c} k={k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub cfg: FormulationConfig,
    /// Worker threads for the rows; `0` or `1` runs them in order on the
    /// calling thread. The report does not depend on this value.
    pub jobs: usize,
    /// Tolerance of the projected reference solve; `None` uses `cfg.tol`.
    pub reference_tol: Option<f64>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        FormulationConfig::default().into()
    }
}

impl From<FormulationConfig> for SweepOptions {
    fn from(cfg: FormulationConfig) -> Self {
        Self {
            cfg,
            jobs: 1,
            reference_tol: None,
        }
    }
}

impl SweepOptions {
    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn with_reference_tol(mut self, tol: f64) -> Self {
        self.reference_tol = Some(tol);
        self
    }

    fn reference_cfg(&self) -> FormulationConfig {
        self.cfg.with_tol(self.reference_tol.unwrap_or(self.cfg.tol))
    }
}

fn map_rows<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if jobs > 1 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            return pool.install(|| items.par_iter().map(&f).collect());
        }
    }
    items.iter().map(f).collect()
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn relative_kernel_component(problem: &DiscreteProblem, u: &[f64]) -> Result<f64> {
    let norm = problem.l_norm(u)?;
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(norm_inf(&problem.kernel_coordinates(u)) / norm)
}

fn fit_column(
    rows: &[SweepRow],
    x: impl Fn(&SweepRow) -> Option<f64>,
    y: impl Fn(&SweepRow) -> f64,
    floor: f64,
) -> Option<RateFit> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| !r.is_failed())
        .filter_map(|r| Some((x(r)?, y(r))))
        .filter(|&(_, v)| v >= floor)
        .collect();
    fit_rate(&points).ok()
}

fn fit_rows(rows: &[SweepRow], x: impl Fn(&SweepRow) -> Option<f64> + Copy, floor: f64) -> FittedRates {
    let h1_rate = fit_column(rows, x, |r| r.h1_error, floor);
    let l2_rate = fit_column(rows, x, |r| r.l2_error, floor);
    let value_rate = fit_column(rows, x, |r| r.value_gap, floor);
    let skipped = if h1_rate.is_none() {
        let usable = rows
            .iter()
            .filter(|r| !r.is_failed() && r.h1_error >= floor)
            .count();
        Some(if usable == 0 {
            format!("no row has an error above the floor {floor:e}")
        } else {
            format!("only {usable} usable row(s)")
        })
    } else {
        None
    };
    FittedRates {
        h1_rate,
        l2_rate,
        value_rate,
        skipped,
    }
}

fn check_etas(etas: &[f64]) -> Result<Vec<f64>> {
    if let Some(bad) = etas.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::invalid("etas", format!("must be positive and finite, got {bad}")));
    }
    if etas.len() >= 2 && etas.iter().all(|e| *e == etas[0]) {
        return Err(Error::Fit("degenerate abscissa: all eta values are equal".into()));
    }
    if etas.len() < 3 {
        return Err(Error::invalid("etas", format!("need at least 3 values, got {}", etas.len())));
    }
    let max = etas.iter().cloned().fold(f64::MIN, f64::max);
    let min = etas.iter().cloned().fold(f64::MAX, f64::min);
    if max / min < 100.0 * (1.0 - 1e-12) {
        return Err(Error::invalid(
            "etas",
            format!("must span at least two decades, got {min:e}..{max:e}"),
        ));
    }
    let mut sorted = etas.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted)
}

fn check_ns(ns: &[usize]) -> Result<()> {
    if ns.len() >= 2 && ns.iter().all(|n| *n == ns[0]) {
        return Err(Error::Fit("degenerate abscissa: all mesh sizes are equal".into()));
    }
    if ns.len() < 3 {
        return Err(Error::invalid("ns", format!("need at least 3 values, got {}", ns.len())));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("ns", "must be strictly increasing"));
    }
    Ok(())
}

/// `sqrt(F^T H^-1 F)` with `H` the problem's Gram matrix.
fn load_dual_norm(problem: &DiscreteProblem, tol: f64) -> Result<f64> {
    let opts = CgOptions::new(tol, 20 * problem.n().max(1));
    let (y, _) = cg_solve(problem.h_gram(), problem.load(), &opts, None)?;
    Ok(dot(problem.load(), &y).max(0.0).sqrt())
}

/// Solves the perturbative problem for each `eta` and measures the distance
/// to the projected reference solution. Rows come out with `eta` descending.
pub fn eta_sweep(problem: &DiscreteProblem, etas: &[f64], opts: &SweepOptions) -> Result<SweepReport> {
    let etas = check_etas(etas)?;
    let cfg = FormulationConfig {
        reject_inconsistent: true,
        ..opts.cfg
    };
    let u0 = solve_projected(problem, &FormulationConfig { tol: opts.reference_tol.unwrap_or(cfg.tol), ..cfg })?;
    let row = |&eta: &f64| -> SweepRow {
        let attempt = || -> Result<SweepRow> {
            let sol = solve_perturbative(problem, &cfg.with_eta(eta))?;
            let diff = sub(&sol.u, &u0.u);
            Ok(SweepRow {
                h: None,
                eta: Some(eta),
                n_dof: problem.n(),
                h1_error: problem.h_norm(&diff)?,
                l2_error: problem.l_norm(&diff)?,
                value_gap: problem.regularized_value(&sol.u, eta)? - u0.value,
                iterations: sol.iterations,
                residual: sol.residual,
                kernel_component: relative_kernel_component(problem, &sol.u)?,
                failure: None,
            })
        };
        attempt().unwrap_or_else(|e| SweepRow::failed(None, Some(eta), problem.n(), e.to_string()))
    };
    let rows = map_rows(&etas, opts.jobs, row);
    let floor = problem.tolerances().fit_floor_factor * cfg.tol;
    let fitted_rates = fit_rows(&rows, |r| r.eta, floor);
    Ok(SweepReport {
        rows,
        fitted_rates,
        metadata: SweepMetadata {
            case: problem.label().to_string(),
            formulation: "perturbative".into(),
            degree: None,
            eta_rule: format!("list of {} values", etas.len()),
            solver_tol: cfg.tol,
            tolerances: *problem.tolerances(),
            load_dual_norm: Some(load_dual_norm(problem, cfg.tol)?),
            timestamp: timestamp(),
        },
        value_gap_decreasing: None,
    })
}

fn build_mesh(case: &ManufacturedCase, n: usize, degree: usize) -> Result<Mesh> {
    match case.dim {
        1 => build_interval_mesh(n, degree),
        2 => build_unit_square_mesh(n, degree),
        d => Err(Error::Unsupported(format!("dimension {d}"))),
    }
}

/// Subtracts the discrete mean `(1^T M u) / (1^T M 1)`.
fn subtract_mean(problem: &DiscreteProblem, u: &[f64]) -> Result<Vec<f64>> {
    let mu = problem.mass().spmv(u)?;
    let measure: f64 = problem.mass().row_sums().iter().sum();
    let mean = mu.iter().sum::<f64>() / measure;
    Ok(u.iter().map(|v| v - mean).collect())
}

fn mesh_row(
    case: &ManufacturedCase,
    n: usize,
    degree: usize,
    rule: EtaRule,
    cfg: &FormulationConfig,
    reference: &FormulationConfig,
) -> Result<SweepRow> {
    let mesh = build_mesh(case, n, degree)?;
    let problem = assemble(&mesh, case)?;
    let eta = rule.eta(mesh.h());
    let u0: Solution = solve_projected(&problem, reference)?;
    let sol = solve_perturbative(&problem, &cfg.with_eta(eta))?;
    let aligned = subtract_mean(&problem, &sol.u)?;
    let norms = error_norms(&mesh, &aligned, case)?;
    Ok(SweepRow {
        h: Some(mesh.h()),
        eta: Some(eta),
        n_dof: problem.n(),
        h1_error: norms.h1,
        l2_error: norms.l2,
        value_gap: problem.regularized_value(&sol.u, eta)? - u0.value,
        iterations: sol.iterations,
        residual: sol.residual,
        kernel_component: relative_kernel_component(&problem, &sol.u)?,
        failure: None,
    })
}

/// Mesh refinement study against the exact solution of `case`.
/// Rows come out with `h` descending.
pub fn h_sweep(
    case: &ManufacturedCase,
    ns: &[usize],
    degree: usize,
    rule: EtaRule,
    opts: &SweepOptions,
) -> Result<SweepReport> {
    check_ns(ns)?;
    let (EtaRule::Fixed(coef) | EtaRule::Coupled { c: coef, .. }) = rule;
    if !(coef > 0.0) {
        return Err(Error::invalid("eta_rule", format!("coefficient must be positive, got {coef}")));
    }
    // Fail fast on an unusable case/degree combination before spawning rows.
    build_mesh(case, ns[0], degree)?;
    let cfg = opts.cfg;
    let reference = opts.reference_cfg();
    let rows = map_rows(ns, opts.jobs, |&n| {
        mesh_row(case, n, degree, rule, &cfg, &reference).unwrap_or_else(|e| {
            let dofs = build_mesh(case, n, degree).map(|m| m.n_nodes()).unwrap_or(0);
            SweepRow::failed(None, None, dofs, e.to_string())
        })
    });
    let floor = crate::config::Tolerances::default().fit_floor_factor * cfg.tol;
    let fitted_rates = fit_rows(&rows, |r| r.h, floor);
    Ok(SweepReport {
        rows,
        fitted_rates,
        metadata: SweepMetadata {
            case: case.name.clone(),
            formulation: "perturbative".into(),
            degree: Some(degree),
            eta_rule: rule.to_string(),
            solver_tol: cfg.tol,
            tolerances: Default::default(),
            load_dual_norm: None,
            timestamp: timestamp(),
        },
        value_gap_decreasing: None,
    })
}

/// [`h_sweep`] with `eta = c h`, also recording whether the value gap
/// strictly decreases under refinement.
pub fn coupled_sweep(
    case: &ManufacturedCase,
    ns: &[usize],
    degree: usize,
    c: f64,
    opts: &SweepOptions,
) -> Result<SweepReport> {
    let mut report = h_sweep(case, ns, degree, EtaRule::Coupled { c, k: 1.0 }, opts)?;
    let gaps: Vec<f64> = report.rows.iter().map(|r| r.value_gap).collect();
    report.value_gap_decreasing = Some(
        report.rows.iter().all(|r| !r.is_failed()) && gaps.windows(2).all(|w| w[1] < w[0]),
    );
    Ok(report)
}

/// Value convergence along an `eta` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaCheck {
    /// `(eta, V_eta(u_eta) - V(u0))`, `eta` descending.
    pub points: Vec<(f64, f64)>,
    pub reference_value: f64,
    /// Every gap is at least `-1e-12 |V(u0)|`.
    pub nonnegative: bool,
    /// The last gap does not exceed the first.
    pub converging: bool,
    /// Gaps never increase as `eta` decreases.
    pub monotone: bool,
}

pub fn gamma_value_check(problem: &DiscreteProblem, etas: &[f64], opts: &SweepOptions) -> Result<GammaCheck> {
    let report = eta_sweep(problem, etas, opts)?;
    if let Some(row) = report.rows.iter().find(|r| r.is_failed()) {
        return Err(Error::Fit(format!(
            "row eta={:e} failed: {}",
            row.eta.unwrap_or(f64::NAN),
            row.failure.as_deref().unwrap_or("")
        )));
    }
    let reference_value = solve_projected(problem, &opts.reference_cfg())?.value;
    let points: Vec<(f64, f64)> = report
        .rows
        .iter()
        .map(|r| (r.eta.unwrap_or(f64::NAN), r.value_gap))
        .collect();
    let slack = 1e-12 * reference_value.abs();
    let nonnegative = points.iter().all(|p| p.1 >= -slack);
    let converging = points.last().map(|p| p.1) <= points.first().map(|p| p.1);
    let monotone = points.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(GammaCheck {
        points,
        reference_value,
        nonnegative,
        converging,
        monotone,
    })
}
