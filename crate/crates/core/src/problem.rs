//! Discrete quadratic problems whose energy form has a known
//! finite-dimensional kernel.
//!
//! A problem is the data `(A, M, H, F, Z)`:
//!
//! * `A` is the symmetric positive semi-definite stiffness matrix of the
//!   energy form `a(u, v) = v^T A u`,
//! * `M` is the Gram matrix of the pivot inner product `(u, v)_L = v^T M u`,
//! * `H` is the Gram matrix of the energy-space inner product (by default
//!   `A + M`),
//! * `F` is the load vector of the linear form `l(v) = F^T v`,
//! * `Z` holds an M-orthonormal basis of the kernel `K` of `A`.
//!
//! The functional `V(u) = 1/2 u^T A u - F^T u` is only determined up to
//! kernel components. Among all minimizers, the one with zero kernel
//! component is also the one with the smallest L-norm; the projectors here
//! split any vector into its kernel part `Z Z^T M u` and its M-orthogonal
//! remainder.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{check_len, Error, Result};
use crate::linalg::{axpy, dot, norm2, norm_inf, Projector, SparseMatrix};

/// M-orthonormal basis of the kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBasis {
    columns: Vec<Vec<f64>>,
}

impl KernelBasis {
    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// Kernel dimension `m`.
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Length of each column.
    pub fn vector_len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// `Z^T M Z - I` measured entrywise.
    pub fn orthonormality_defect(&self, mass: &SparseMatrix) -> f64 {
        let mz: Vec<Vec<f64>> = self.columns.iter().map(|z| mass.spmv(z).unwrap()).collect();
        let mut worst: f64 = 0.0;
        for (i, zi) in self.columns.iter().enumerate() {
            for (j, mzj) in mz.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(zi, mzj) - target).abs());
            }
        }
        worst
    }
}

/// M-orthonormalizes raw kernel columns with modified Gram-Schmidt and one
/// reorthogonalization pass.
pub fn orthonormalize_kernel(
    raw_columns: &[Vec<f64>],
    mass: &SparseMatrix,
    rank_tol: f64,
) -> Result<KernelBasis> {
    if raw_columns.is_empty() {
        return Err(Error::invalid("kernel", "at least one kernel column is required"));
    }
    let n = mass.n_rows();
    if raw_columns.len() > n {
        return Err(Error::invalid("kernel", format!("{} columns exceed n = {n}", raw_columns.len())));
    }
    let m_norm = |v: &[f64]| dot(v, &mass.spmv(v).unwrap()).max(0.0).sqrt();

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(raw_columns.len());
    for (c, raw) in raw_columns.iter().enumerate() {
        check_len(n, raw.len())?;
        let original = m_norm(raw);
        let mut v = raw.clone();
        for _pass in 0..2 {
            for q in &basis {
                let coeff = dot(q, &mass.spmv(&v).unwrap());
                axpy(-coeff, q, &mut v);
            }
        }
        let nrm = m_norm(&v);
        if !(nrm > rank_tol * original) || original == 0.0 {
            return Err(Error::RankDeficientKernel { column: c });
        }
        v.iter_mut().for_each(|x| *x /= nrm);
        basis.push(v);
    }
    Ok(KernelBasis { columns: basis })
}

/// One degenerate quadratic problem instance.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    label: String,
    stiffness: SparseMatrix,
    mass: SparseMatrix,
    h_gram: SparseMatrix,
    load: Vec<f64>,
    kernel: KernelBasis,
    /// `M z_j` for each kernel column, cached.
    mass_kernel: Vec<Vec<f64>>,
    tolerances: Tolerances,
}

impl DiscreteProblem {
    /// Validates the data and M-orthonormalizes the kernel columns.
    pub fn new(
        label: impl Into<String>,
        stiffness: SparseMatrix,
        mass: SparseMatrix,
        load: Vec<f64>,
        raw_kernel: &[Vec<f64>],
    ) -> Result<Self> {
        Self::with_tolerances(label, stiffness, mass, load, raw_kernel, Tolerances::default())
    }

    pub fn with_tolerances(
        label: impl Into<String>,
        stiffness: SparseMatrix,
        mass: SparseMatrix,
        load: Vec<f64>,
        raw_kernel: &[Vec<f64>],
        tolerances: Tolerances,
    ) -> Result<Self> {
        let n = stiffness.n_rows();
        check_len(n, stiffness.n_cols())?;
        check_len(n, mass.n_rows())?;
        check_len(n, mass.n_cols())?;
        check_len(n, load.len())?;
        validate_symmetric_pair(&stiffness, &mass)?;

        // already orthonormal columns are kept bit for bit
        let kernel = if raw_kernel.iter().all(|c| c.len() == n) && {
            let candidate = KernelBasis {
                columns: raw_kernel.to_vec(),
            };
            !candidate.is_empty()
                && candidate.orthonormality_defect(&mass) <= tolerances.kernel_orthonormality
        } {
            KernelBasis {
                columns: raw_kernel.to_vec(),
            }
        } else {
            orthonormalize_kernel(raw_kernel, &mass, tolerances.rank)?
        };

        let a_scale = stiffness.norm_inf();
        for (j, z) in kernel.columns.iter().enumerate() {
            let residual = norm_inf(&stiffness.spmv(z)?);
            if residual > tolerances.kernel_membership * a_scale {
                return Err(Error::NotInKernel { column: j, residual });
            }
        }

        let h_gram = stiffness.add_scaled(1.0, &mass)?;
        let mass_kernel = kernel.columns.iter().map(|z| mass.spmv(z).unwrap()).collect();
        Ok(Self {
            label: label.into(),
            stiffness,
            mass,
            h_gram,
            load,
            kernel,
            mass_kernel,
            tolerances,
        })
    }

    /// Replaces the default `A + M` energy-space Gram matrix.
    pub fn with_h_gram(mut self, h_gram: SparseMatrix) -> Result<Self> {
        check_len(self.n(), h_gram.n_rows())?;
        check_len(self.n(), h_gram.n_cols())?;
        if !h_gram.is_symmetric(1e-15) {
            return Err(Error::NotSymmetric("H Gram matrix"));
        }
        self.h_gram = h_gram;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn n(&self) -> usize {
        self.load.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn stiffness(&self) -> &SparseMatrix {
        &self.stiffness
    }

    pub fn mass(&self) -> &SparseMatrix {
        &self.mass
    }

    pub fn h_gram(&self) -> &SparseMatrix {
        &self.h_gram
    }

    pub fn load(&self) -> &[f64] {
        &self.load
    }

    pub fn kernel(&self) -> &KernelBasis {
        &self.kernel
    }

    /// Columns `M z_j`.
    pub fn mass_kernel(&self) -> &[Vec<f64>] {
        &self.mass_kernel
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn set_tolerances(&mut self, tolerances: Tolerances) {
        self.tolerances = tolerances;
    }

    /// Kernel coordinates `Z^T M u`.
    pub fn kernel_coordinates(&self, u: &[f64]) -> Vec<f64> {
        self.mass_kernel.iter().map(|mz| dot(mz, u)).collect()
    }

    /// `Pi_par u = Z Z^T M u`.
    pub fn project_parallel(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), u.len())?;
        let mut out = vec![0.0; u.len()];
        for (z, c) in self.kernel.columns.iter().zip(self.kernel_coordinates(u)) {
            axpy(c, z, &mut out);
        }
        Ok(out)
    }

    /// `Pi_perp u = u - Pi_par u`.
    pub fn project_perp(&self, u: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), u.len())?;
        let mut out = u.to_vec();
        for (z, c) in self.kernel.columns.iter().zip(self.kernel_coordinates(u)) {
            axpy(-c, z, &mut out);
        }
        Ok(out)
    }

    /// `V(u) = 1/2 u^T A u - F^T u`.
    pub fn energy_value(&self, u: &[f64]) -> Result<f64> {
        let au = self.stiffness.spmv(u)?;
        Ok(0.5 * dot(u, &au) - dot(&self.load, u))
    }

    /// `V(u) + eta/2 u^T M u`.
    pub fn regularized_value(&self, u: &[f64], eta: f64) -> Result<f64> {
        if !(eta > 0.0) {
            return Err(Error::invalid("eta", format!("must be positive, got {eta}")));
        }
        let mu = self.mass.spmv(u)?;
        Ok(self.energy_value(u)? + 0.5 * eta * dot(u, &mu))
    }

    /// `l(z_j) = F^T z_j` for each kernel column.
    pub fn check_consistency(&self) -> Vec<f64> {
        self.kernel.columns.iter().map(|z| dot(&self.load, z)).collect()
    }

    pub fn is_consistent(&self) -> bool {
        self.first_inconsistency().is_none()
    }

    /// Index and value of the first kernel component of the load exceeding
    /// the consistency tolerance.
    pub fn first_inconsistency(&self) -> Option<(usize, f64, f64)> {
        let tol = self.tolerances.consistency * norm2(&self.load);
        self.check_consistency()
            .into_iter()
            .enumerate()
            .find(|(_, v)| v.abs() > tol)
            .map(|(j, v)| (j, v, tol))
    }

    /// Removes the kernel component of the load: `F - (M Z)(Z^T F)`.
    pub fn make_consistent(&self) -> DiscreteProblem {
        let mut out = self.clone();
        if self.is_consistent() {
            return out;
        }
        for _pass in 0..2 {
            let comps: Vec<f64> = out.kernel.columns.iter().map(|z| dot(&out.load, z)).collect();
            for (mz, c) in self.mass_kernel.iter().zip(comps) {
                axpy(-c, mz, &mut out.load);
            }
        }
        out
    }

    pub fn h_norm(&self, u: &[f64]) -> Result<f64> {
        Ok(dot(u, &self.h_gram.spmv(u)?).max(0.0).sqrt())
    }

    pub fn l_norm(&self, u: &[f64]) -> Result<f64> {
        Ok(dot(u, &self.mass.spmv(u)?).max(0.0).sqrt())
    }

    /// The pair `(Pi_perp, Pi_perp^T)` as a solver projector.
    pub fn perp_projector(&self) -> KernelProjector<'_> {
        KernelProjector { problem: self }
    }
}

fn validate_symmetric_pair(stiffness: &SparseMatrix, mass: &SparseMatrix) -> Result<()> {
    if !stiffness.is_symmetric(1e-15) {
        return Err(Error::NotSymmetric("stiffness matrix"));
    }
    if !mass.is_symmetric(1e-15) {
        return Err(Error::NotSymmetric("mass matrix"));
    }
    for (row, diagonal) in mass.diagonal_values().into_iter().enumerate() {
        if !(diagonal > 0.0) {
            return Err(Error::NotPositiveDefinite { row, diagonal });
        }
    }
    Ok(())
}

/// `Pi_perp` on iterates and `Pi_perp^T = I - M Z Z^T` on residuals.
#[derive(Debug, Clone, Copy)]
pub struct KernelProjector<'a> {
    problem: &'a DiscreteProblem,
}

impl Projector for KernelProjector<'_> {
    fn project(&self, x: &[f64]) -> Vec<f64> {
        self.problem.project_perp(x).expect("projector dimension")
    }

    fn project_dual(&self, r: &[f64]) -> Vec<f64> {
        let mut out = r.to_vec();
        for (z, mz) in self.problem.kernel.columns.iter().zip(&self.problem.mass_kernel) {
            axpy(-dot(z, r), mz, &mut out);
        }
        out
    }
}

/// Extreme Rayleigh quotients of `a(u, u) / |u|_H^2` on the complement of the
/// kernel: estimates of the coercivity and continuity constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormConstants {
    pub coercivity: f64,
    pub continuity: f64,
    pub converged: bool,
}

/// Estimates the form constants by generalized power and inverse iteration
/// `A x = lambda H x` restricted to the complement of the kernel.
pub fn estimate_form_constants(problem: &DiscreteProblem, max_iter: usize) -> FormConstants {
    use crate::linalg::{cg_solve, CgOptions};

    let n = problem.n();
    let proj = problem.perp_projector();
    let opts = CgOptions::new(1e-10, 20 * n.max(1));
    let a = problem.stiffness();
    let h = problem.h_gram();
    let ratio = |x: &[f64]| {
        let ax = a.spmv(x).unwrap();
        let hx = h.spmv(x).unwrap();
        dot(x, &ax) / dot(x, &hx)
    };
    let tol = problem.tolerances().eig;
    let start: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (1.7 * i as f64 + 0.3).sin()).collect();
    let mut converged = true;

    // largest: x <- Pi_perp H^{-1} A x
    let mut x = proj.project(&start);
    let mut hi = ratio(&x);
    let mut ok = false;
    for _ in 0..max_iter {
        let (y, d) = cg_solve(h, &a.spmv(&x).unwrap(), &opts, None).unwrap();
        converged &= d.converged;
        let y = proj.project(&y);
        let ny = norm2(&y);
        if ny == 0.0 {
            break;
        }
        x = y.iter().map(|v| v / ny).collect();
        let next = ratio(&x);
        let done = (next - hi).abs() <= tol * next.abs();
        hi = next;
        if done {
            ok = true;
            break;
        }
    }
    converged &= ok;

    // smallest: x <- A^+ H x on the complement
    let mut x = proj.project(&start);
    let mut lo = ratio(&x);
    let mut ok = false;
    for _ in 0..max_iter {
        let rhs = proj.project_dual(&h.spmv(&x).unwrap());
        let (y, d) = cg_solve(a, &rhs, &opts, Some(&proj)).unwrap();
        converged &= d.converged;
        let ny = norm2(&y);
        if ny == 0.0 {
            break;
        }
        x = y.iter().map(|v| v / ny).collect();
        let next = ratio(&x);
        let done = (next - lo).abs() <= tol * next.abs();
        lo = next;
        if done {
            ok = true;
            break;
        }
    }
    converged &= ok;

    FormConstants {
        coercivity: lo,
        continuity: hi,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn toy(load: Vec<f64>) -> DiscreteProblem {
        DiscreteProblem::new(
            "toy",
            SparseMatrix::from_dense(&[vec![1.0, -1.0], vec![-1.0, 1.0]]),
            SparseMatrix::identity(2),
            load,
            &[vec![1.0, 1.0]],
        )
        .unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn orthonormalize_examples() {
        let half = SparseMatrix::diagonal(&[0.5, 0.5]);
        let k = orthonormalize_kernel(&[vec![1.0, 1.0]], &half, 1e-10).unwrap();
        assert!(close(&k.columns()[0], &[1.0, 1.0], 1e-15));
        let k = orthonormalize_kernel(&[vec![2.0, 2.0]], &half, 1e-10).unwrap();
        assert!(close(&k.columns()[0], &[1.0, 1.0], 1e-15));
        assert!(k.orthonormality_defect(&half) <= 1e-12);
        let dup = orthonormalize_kernel(
            &[vec![1.0, 1.0], vec![1.0, 1.0]],
            &SparseMatrix::identity(2),
            1e-10,
        );
        assert!(matches!(dup, Err(Error::RankDeficientKernel { column: 1 })));
    }

    #[test]
    fn toy_kernel_is_normalized() {
        let p = toy(vec![1.0, -1.0]);
        assert!(close(&p.kernel().columns()[0], &[FRAC_1_SQRT_2, FRAC_1_SQRT_2], 1e-15));
    }

    #[test]
    fn projector_examples() {
        let p = toy(vec![1.0, -1.0]);
        let z = p.kernel().columns()[0].clone();
        assert!(close(&p.project_parallel(&z).unwrap(), &z, 1e-15));
        assert!(close(&p.project_parallel(&[1.0, -1.0]).unwrap(), &[0.0, 0.0], 1e-15));
        assert!(close(&p.project_parallel(&[1.0, 0.0]).unwrap(), &[0.5, 0.5], 1e-15));

        assert!(close(&p.project_perp(&z).unwrap(), &[0.0, 0.0], 1e-15));
        assert!(close(&p.project_perp(&[2.0, -2.0]).unwrap(), &[2.0, -2.0], 1e-15));
        assert!(close(&p.project_perp(&[1.0, 0.0]).unwrap(), &[0.5, -0.5], 1e-15));
    }

    #[test]
    fn energy_examples() {
        let p = toy(vec![1.0, -1.0]);
        assert_eq!(p.energy_value(&[0.0, 0.0]).unwrap(), 0.0);
        assert!((p.energy_value(&[0.5, -0.5]).unwrap() + 0.5).abs() < 1e-15);
        assert!(p.energy_value(&[1.0, -1.0]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn regularized_examples() {
        let p = toy(vec![1.0, -1.0]);
        assert_eq!(p.regularized_value(&[0.0, 0.0], 0.3).unwrap(), 0.0);
        assert!((p.regularized_value(&[0.5, -0.5], 0.1).unwrap() + 0.475).abs() < 1e-15);
        assert!(matches!(
            p.regularized_value(&[0.5, -0.5], 0.0),
            Err(Error::InvalidParameter { name: "eta", .. })
        ));
    }

    #[test]
    fn consistency_examples() {
        assert_eq!(toy(vec![2.0, -2.0]).check_consistency(), vec![0.0]);
        assert!(toy(vec![1.0, -1.0]).check_consistency()[0].abs() < 1e-16);
        let c = toy(vec![1.0, 0.0]).check_consistency();
        assert!((c[0] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(!toy(vec![1.0, 0.0]).is_consistent());
    }

    #[test]
    fn make_consistent_examples() {
        let p = toy(vec![1.0, -1.0]);
        assert_eq!(p.make_consistent().load(), p.load());
        let q = toy(vec![1.0, 0.0]).make_consistent();
        assert!(close(q.load(), &[0.5, -0.5], 1e-15));
        assert!(q.check_consistency()[0].abs() <= 1e-12);
        let z = toy(vec![1.0, -1.0]).kernel().columns()[0].clone();
        let r = toy(z).make_consistent();
        assert!(close(r.load(), &[0.0, 0.0], 1e-15));
    }

    #[test]
    fn norm_examples() {
        let p = toy(vec![1.0, -1.0]);
        assert_eq!(p.l_norm(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(p.h_norm(&[0.0, 0.0]).unwrap(), 0.0);
        assert!((p.l_norm(&[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-15);
        assert!((p.h_norm(&[1.0, -1.0]).unwrap() - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_kernel_vector() {
        let r = DiscreteProblem::new(
            "bad",
            SparseMatrix::from_dense(&[vec![1.0, -1.0], vec![-1.0, 1.0]]),
            SparseMatrix::identity(2),
            vec![0.0, 0.0],
            &[vec![1.0, 0.0]],
        );
        assert!(matches!(r, Err(Error::NotInKernel { column: 0, .. })));
    }

    #[test]
    fn rejects_nonsymmetric_stiffness() {
        let r = DiscreteProblem::new(
            "bad",
            SparseMatrix::from_dense(&[vec![1.0, -1.0], vec![-0.5, 1.0]]),
            SparseMatrix::identity(2),
            vec![0.0, 0.0],
            &[vec![1.0, 1.0]],
        );
        assert!(matches!(r, Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn toy_form_constants() {
        // on K-perp, u = t(1,-1): a = 4t^2, |u|_H^2 = 6t^2
        let c = estimate_form_constants(&toy(vec![1.0, -1.0]), 1000);
        assert!((c.coercivity - 2.0 / 3.0).abs() < 1e-10);
        assert!((c.continuity - 2.0 / 3.0).abs() < 1e-10);
    }
}
