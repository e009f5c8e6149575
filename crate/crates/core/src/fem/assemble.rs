use std::collections::HashMap;

use super::quadrature::{gauss_interval, triangle_midpoints};
use super::{ManufacturedCase, Mesh, Point};
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::problem::DiscreteProblem;

/// Reference basis on `[0, 1]`: values and derivatives.
pub(crate) fn interval_basis(degree: usize, xi: f64) -> (Vec<f64>, Vec<f64>) {
    match degree {
        1 => (vec![1.0 - xi, xi], vec![-1.0, 1.0]),
        2 => (
            vec![(1.0 - xi) * (1.0 - 2.0 * xi), 4.0 * xi * (1.0 - xi), xi * (2.0 * xi - 1.0)],
            vec![4.0 * xi - 3.0, 4.0 - 8.0 * xi, 4.0 * xi - 1.0],
        ),
        _ => unreachable!("degree checked by the mesh builder"),
    }
}

/// Affine data of triangle `e`: vertices, area, and the constant gradients
/// of the three linear basis functions.
pub(crate) fn triangle_geometry(mesh: &Mesh, e: usize) -> ([Point; 3], f64, [[f64; 2]; 3]) {
    let t = &mesh.elements()[e];
    let p = [mesh.nodes()[t[0]], mesh.nodes()[t[1]], mesh.nodes()[t[2]]];
    let area = mesh.signed_area(e);
    let d = 2.0 * area;
    let grads = [
        [(p[1][1] - p[2][1]) / d, (p[2][0] - p[1][0]) / d],
        [(p[2][1] - p[0][1]) / d, (p[0][0] - p[2][0]) / d],
        [(p[0][1] - p[1][1]) / d, (p[1][0] - p[0][0]) / d],
    ];
    (p, area, grads)
}

pub(crate) fn triangle_point(p: &[Point; 3], s: f64, t: f64) -> Point {
    [
        p[0][0] + s * (p[1][0] - p[0][0]) + t * (p[2][0] - p[0][0]),
        p[0][1] + s * (p[1][1] - p[0][1]) + t * (p[2][1] - p[0][1]),
    ]
}

/// Neumann stiffness, consistent mass, and load for `case` on `mesh`, with
/// the constants as kernel.
pub fn assemble(mesh: &Mesh, case: &ManufacturedCase) -> Result<DiscreteProblem> {
    if mesh.dim() != case.dim {
        return Err(Error::invalid(
            "case",
            format!("{}D case on a {}D mesh", case.dim, mesh.dim()),
        ));
    }
    let n = mesh.n_nodes();
    let mut a_trip = Vec::new();
    let mut m_trip = Vec::new();
    let mut load = vec![0.0; n];

    match mesh.dim() {
        1 => {
            let k = mesh.degree();
            // mass integrand has degree 2k; load gets one extra order
            let rule = gauss_interval(k + 1);
            for elem in mesh.elements() {
                let x0 = mesh.nodes()[elem[0]][0];
                let h = mesh.nodes()[*elem.last().unwrap()][0] - x0;
                let loc = elem.len();
                let mut ke = vec![0.0; loc * loc];
                let mut me = vec![0.0; loc * loc];
                for &(xi, w) in &rule {
                    let (phi, dphi) = interval_basis(k, xi);
                    let f = (case.forcing)([x0 + h * xi, 0.0]);
                    for i in 0..loc {
                        load[elem[i]] += w * h * f * phi[i];
                        for j in i..loc {
                            ke[i * loc + j] += w * dphi[i] * dphi[j] / h;
                            me[i * loc + j] += w * h * phi[i] * phi[j];
                        }
                    }
                }
                for i in 0..loc {
                    for j in 0..loc {
                        let upper = i.min(j) * loc + i.max(j);
                        a_trip.push((elem[i], elem[j], ke[upper]));
                        m_trip.push((elem[i], elem[j], me[upper]));
                    }
                }
            }
            if let Some(g) = &case.neumann_flux {
                let first = 0;
                let last = n - 1;
                load[first] += g(mesh.nodes()[first]);
                load[last] += g(mesh.nodes()[last]);
            }
        }
        2 => {
            let rule = triangle_midpoints();
            for (e, tri) in mesh.elements().iter().enumerate() {
                let (p, area, grads) = triangle_geometry(mesh, e);
                for i in 0..3 {
                    for j in 0..3 {
                        let kij = area * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                        let mij = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                        a_trip.push((tri[i], tri[j], kij));
                        m_trip.push((tri[i], tri[j], mij));
                    }
                }
                for &([s, t], w) in &rule {
                    let f = (case.forcing)(triangle_point(&p, s, t));
                    let phi = [1.0 - s - t, s, t];
                    for i in 0..3 {
                        load[tri[i]] += 2.0 * area * w * f * phi[i];
                    }
                }
            }
            if let Some(g) = &case.neumann_flux {
                add_boundary_flux_2d(mesh, g.as_ref(), &mut load);
            }
        }
        d => return Err(Error::Unsupported(format!("{d}D meshes"))),
    }

    let stiffness = SparseMatrix::from_triplets(n, n, &a_trip)?;
    let mass = SparseMatrix::from_triplets(n, n, &m_trip)?;
    let label = format!("{}-n{}-k{}", case.name, mesh.subdivisions(), mesh.degree());
    DiscreteProblem::new(label, stiffness, mass, load, &[vec![1.0; n]])
}

fn add_boundary_flux_2d(mesh: &Mesh, g: &(dyn Fn(Point) -> f64 + Send + Sync), load: &mut [f64]) {
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for t in mesh.elements() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *edges.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mut boundary: Vec<(usize, usize)> =
        edges.into_iter().filter(|(_, c)| *c == 1).map(|(e, _)| e).collect();
    boundary.sort_unstable();
    let rule = gauss_interval(2);
    for (a, b) in boundary {
        let (pa, pb) = (mesh.nodes()[a], mesh.nodes()[b]);
        let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
        for &(s, w) in &rule {
            let x = [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])];
            let gx = g(x);
            load[a] += w * len * gx * (1.0 - s);
            load[b] += w * len * gx * s;
        }
    }
}

/// Nodal interpolant of `g`.
pub fn interpolate(mesh: &Mesh, g: impl Fn(Point) -> f64) -> Vec<f64> {
    mesh.nodes().iter().map(|&p| g(p)).collect()
}
