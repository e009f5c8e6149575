use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Coordinates; the second component is zero in 1D.
pub type Point = [f64; 2];

/// Uniform mesh of `[0, 1]` or `[0, 1]^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    degree: usize,
    nodes: Vec<Point>,
    /// Local node order: 1D degree 1 `(left, right)`, 1D degree 2
    /// `(left, midpoint, right)`, 2D counter-clockwise vertices.
    elements: Vec<Vec<usize>>,
    h: f64,
    n: usize,
}

impl Mesh {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lagrange polynomial degree `k`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    /// Largest element diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of subdivisions per axis the mesh was built with.
    pub fn subdivisions(&self) -> usize {
        self.n
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Twice the signed area of triangle `e` (2D only).
    pub fn signed_area(&self, e: usize) -> f64 {
        let t = &self.elements[e];
        let [p0, p1, p2] = [self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]];
        0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
    }

    /// Plain-text dump: a header, one line per node, one line per element
    /// (0-based node indices).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mesh dim {} degree {} h {:.16e}", self.dim, self.degree, self.h);
        let _ = writeln!(out, "nodes {}", self.nodes.len());
        for p in &self.nodes {
            if self.dim == 1 {
                let _ = writeln!(out, "{:.16e}", p[0]);
            } else {
                let _ = writeln!(out, "{:.16e} {:.16e}", p[0], p[1]);
            }
        }
        let _ = writeln!(out, "elements {}", self.elements.len());
        for e in &self.elements {
            let line: Vec<String> = e.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// Uniform mesh of `[0, 1]` with `n` elements of degree 1 or 2.
pub fn build_interval_mesh(n: usize, degree: usize) -> Result<Mesh> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 elements, got {n}")));
    }
    let (nodes, elements) = match degree {
        1 => (
            (0..=n).map(|i| [i as f64 / n as f64, 0.0]).collect(),
            (0..n).map(|e| vec![e, e + 1]).collect(),
        ),
        2 => (
            (0..=2 * n).map(|i| [i as f64 / (2 * n) as f64, 0.0]).collect(),
            (0..n).map(|e| vec![2 * e, 2 * e + 1, 2 * e + 2]).collect(),
        ),
        _ => return Err(Error::Unsupported(format!("interval elements of degree {degree}"))),
    };
    Ok(Mesh {
        dim: 1,
        degree,
        nodes,
        elements,
        h: 1.0 / n as f64,
        n,
    })
}

/// `n x n` grid on the unit square, each cell cut along the same diagonal
/// into two linear triangles.
pub fn build_unit_square_mesh(n: usize, degree: usize) -> Result<Mesh> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 cells per side, got {n}")));
    }
    if degree != 1 {
        return Err(Error::Unsupported(format!("triangle elements of degree {degree}")));
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            nodes.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    let mut elements = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (v00, v10, v01, v11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            elements.push(vec![v00, v10, v11]);
            elements.push(vec![v00, v11, v01]);
        }
    }
    Ok(Mesh {
        dim: 2,
        degree,
        nodes,
        elements,
        h: 2f64.sqrt() / n as f64,
        n,
    })
}
