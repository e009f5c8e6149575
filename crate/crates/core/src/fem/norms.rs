use serde::{Deserialize, Serialize};

use super::assemble::{interval_basis, triangle_geometry, triangle_point};
use super::quadrature::{gauss_interval, triangle_degree4};
use super::{ManufacturedCase, Mesh};
use crate::error::{check_len, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    /// Full H¹ norm: value and gradient parts combined.
    pub h1: f64,
    pub l2: f64,
    /// Gradient part alone (the H¹ seminorm).
    pub h1_semi: f64,
}

/// `|u_h - u|` in L² and H¹ against the exact solution of `case`, by
/// element quadrature one order above the assembly rules.
pub fn error_norms(mesh: &Mesh, u_h: &[f64], case: &ManufacturedCase) -> Result<ErrorNorms> {
    check_len(mesh.n_nodes(), u_h.len())?;
    let mut l2 = 0.0;
    let mut semi = 0.0;
    match mesh.dim() {
        1 => {
            let k = mesh.degree();
            let rule = gauss_interval(k + 2);
            for elem in mesh.elements() {
                let x0 = mesh.nodes()[elem[0]][0];
                let h = mesh.nodes()[*elem.last().unwrap()][0] - x0;
                for &(xi, w) in &rule {
                    let (phi, dphi) = interval_basis(k, xi);
                    let (mut v, mut dv) = (0.0, 0.0);
                    for (i, &node) in elem.iter().enumerate() {
                        v += u_h[node] * phi[i];
                        dv += u_h[node] * dphi[i] / h;
                    }
                    let x = [x0 + h * xi, 0.0];
                    let e = v - (case.exact_u)(x);
                    let de = dv - (case.exact_grad)(x)[0];
                    l2 += w * h * e * e;
                    semi += w * h * de * de;
                }
            }
        }
        _ => {
            let rule = triangle_degree4();
            for (e, tri) in mesh.elements().iter().enumerate() {
                let (p, area, grads) = triangle_geometry(mesh, e);
                let mut g = [0.0; 2];
                for i in 0..3 {
                    g[0] += u_h[tri[i]] * grads[i][0];
                    g[1] += u_h[tri[i]] * grads[i][1];
                }
                for &([s, t], w) in &rule {
                    let x = triangle_point(&p, s, t);
                    let phi = [1.0 - s - t, s, t];
                    let v: f64 = (0..3).map(|i| u_h[tri[i]] * phi[i]).sum();
                    let ex = (case.exact_grad)(x);
                    let err = v - (case.exact_u)(x);
                    let jac = 2.0 * area * w;
                    l2 += jac * err * err;
                    semi += jac * ((g[0] - ex[0]).powi(2) + (g[1] - ex[1]).powi(2));
                }
            }
        }
    }
    Ok(ErrorNorms {
        h1: (l2 + semi).sqrt(),
        l2: l2.sqrt(),
        h1_semi: semi.sqrt(),
    })
}
