//! Dense symmetric-indefinite factorization `P A P^T = L D L^T` with
//! Bunch-Kaufman pivoting (1x1 and 2x2 diagonal blocks).

use crate::error::{check_len, Error, Result};

/// Square dense matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "row {i} has wrong length");
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn swap_symmetric(&mut self, a: usize, b: usize) {
        let n = self.n;
        for j in 0..n {
            self.data.swap(a * n + j, b * n + j);
        }
        for i in 0..n {
            self.data.swap(i * n + a, i * n + b);
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Pivot {
    One(f64),
    /// `[[a, b], [b, c]]`
    Two(f64, f64, f64),
}

#[derive(Debug, Clone)]
pub struct LdlFactor {
    n: usize,
    /// unit lower triangle, row-major, diagonal unused
    lower: Vec<f64>,
    pivots: Vec<(usize, Pivot)>,
    perm: Vec<usize>,
}

// (1 + sqrt(17)) / 8
const BK_ALPHA: f64 = 0.640_388_203_202_208_4;

impl LdlFactor {
    /// Factors a symmetric matrix. A pivot (or 2x2 pivot determinant scale)
    /// below `pivot_tol * max|A|` is reported as a singular system.
    pub fn new(a: &DenseMatrix, pivot_tol: f64) -> Result<Self> {
        let n = a.n;
        let threshold = pivot_tol * a.max_abs();
        let mut w = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut pivots = Vec::new();

        let mut k = 0;
        while k < n {
            let akk = w.get(k, k).abs();
            let (imax, colmax) = ((k + 1)..n)
                .map(|i| (i, w.get(i, k).abs()))
                .fold((k, 0.0), |best, c| if c.1 > best.1 { c } else { best });

            if akk.max(colmax) <= threshold {
                return Err(Error::SingularSystem {
                    step: k,
                    pivot: akk.max(colmax),
                });
            }

            let (kp, step) = if akk >= BK_ALPHA * colmax {
                (k, 1)
            } else {
                let rowmax = (k..n)
                    .filter(|&j| j != imax)
                    .map(|j| w.get(imax, j).abs())
                    .fold(0.0, f64::max);
                if akk * rowmax >= BK_ALPHA * colmax * colmax {
                    (k, 1)
                } else if w.get(imax, imax).abs() >= BK_ALPHA * rowmax {
                    (imax, 1)
                } else {
                    (imax, 2)
                }
            };

            let kk = k + step - 1;
            if kp != kk {
                w.swap_symmetric(kk, kp);
                perm.swap(kk, kp);
            }

            if step == 1 {
                let d = w.get(k, k);
                if d.abs() <= threshold {
                    return Err(Error::SingularSystem { step: k, pivot: d });
                }
                for i in (k + 1)..n {
                    let wik = w.get(i, k);
                    if wik == 0.0 {
                        continue;
                    }
                    let l = wik / d;
                    for j in (k + 1)..=i {
                        let v = w.get(i, j) - l * w.get(j, k);
                        w.set(i, j, v);
                        w.set(j, i, v);
                    }
                }
                for i in (k + 1)..n {
                    let l = w.get(i, k) / d;
                    w.set(i, k, l);
                }
                pivots.push((k, Pivot::One(d)));
            } else {
                let (d11, d21, d22) = (w.get(k, k), w.get(k + 1, k), w.get(k + 1, k + 1));
                let det = d11 * d22 - d21 * d21;
                if det.abs() <= threshold * d21.abs().max(threshold) {
                    return Err(Error::SingularSystem { step: k, pivot: det });
                }
                let mut ls = Vec::with_capacity(n - k - 2);
                for i in (k + 2)..n {
                    let (wi0, wi1) = (w.get(i, k), w.get(i, k + 1));
                    // [l0 l1] = [wi0 wi1] D^{-1}
                    let l0 = (wi0 * d22 - wi1 * d21) / det;
                    let l1 = (wi1 * d11 - wi0 * d21) / det;
                    ls.push((l0, l1));
                }
                for (a, i) in ((k + 2)..n).enumerate() {
                    let (l0, l1) = ls[a];
                    for j in (k + 2)..=i {
                        let v = w.get(i, j) - l0 * w.get(j, k) - l1 * w.get(j, k + 1);
                        w.set(i, j, v);
                        w.set(j, i, v);
                    }
                }
                for (a, i) in ((k + 2)..n).enumerate() {
                    w.set(i, k, ls[a].0);
                    w.set(i, k + 1, ls[a].1);
                }
                w.set(k + 1, k, 0.0);
                pivots.push((k, Pivot::Two(d11, d21, d22)));
            }
            k += step;
        }

        Ok(Self {
            n,
            lower: w.data,
            pivots,
            perm,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, b.len())?;
        let n = self.n;
        let l = |i: usize, j: usize| self.lower[i * n + j];

        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        // L z = P b
        for i in 0..n {
            let s: f64 = (0..i).map(|j| l(i, j) * y[j]).sum();
            y[i] -= s;
        }
        // D w = z
        for &(k, piv) in &self.pivots {
            match piv {
                Pivot::One(d) => y[k] /= d,
                Pivot::Two(a, b2, c) => {
                    let det = a * c - b2 * b2;
                    let (z0, z1) = (y[k], y[k + 1]);
                    y[k] = (c * z0 - b2 * z1) / det;
                    y[k + 1] = (a * z1 - b2 * z0) / det;
                }
            }
        }
        // L^T v = w
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|j| l(j, i) * y[j]).sum();
            y[i] -= s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        Ok(x)
    }
}

/// Factor-and-solve convenience wrapper.
pub fn ldl_solve(a: &DenseMatrix, b: &[f64], pivot_tol: f64) -> Result<Vec<f64>> {
    LdlFactor::new(a, pivot_tol)?.solve(b)
}
