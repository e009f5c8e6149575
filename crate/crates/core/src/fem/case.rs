use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::Point;

pub type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;

/// A manufactured solution of the Neumann problem with its data.
#[derive(Clone)]
pub struct ManufacturedCase {
    pub name: String,
    pub dim: usize,
    /// Exact solution, zero mean over the domain.
    pub exact_u: ScalarField,
    pub exact_grad: VectorField,
    /// `-Δ exact_u`.
    pub forcing: ScalarField,
    /// Outward normal derivative on the boundary; `None` means homogeneous.
    pub neumann_flux: Option<ScalarField>,
}

impl fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("neumann_flux", &self.neumann_flux.is_some())
            .finish()
    }
}

/// `u = cos(πx)` on `[0, 1]`.
pub fn case_cosine_1d() -> ManufacturedCase {
    ManufacturedCase {
        name: "cosine1d".into(),
        dim: 1,
        exact_u: Arc::new(|p| (PI * p[0]).cos()),
        exact_grad: Arc::new(|p| [-PI * (PI * p[0]).sin(), 0.0]),
        forcing: Arc::new(|p| PI * PI * (PI * p[0]).cos()),
        neumann_flux: None,
    }
}

/// `u = cos(πx) cos(πy)` on `[0, 1]^2`.
pub fn case_cosine_2d() -> ManufacturedCase {
    ManufacturedCase {
        name: "cosine2d".into(),
        dim: 2,
        exact_u: Arc::new(|p| (PI * p[0]).cos() * (PI * p[1]).cos()),
        exact_grad: Arc::new(|p| {
            let (sx, cx) = (PI * p[0]).sin_cos();
            let (sy, cy) = (PI * p[1]).sin_cos();
            [-PI * sx * cy, -PI * cx * sy]
        }),
        forcing: Arc::new(|p| 2.0 * PI * PI * (PI * p[0]).cos() * (PI * p[1]).cos()),
        neumann_flux: None,
    }
}

/// `u = x^2 - x + 1/6`: constant forcing `-2` balanced by unit outward flux
/// at both ends. Quadratic elements reproduce it exactly.
pub fn case_quadratic_1d() -> ManufacturedCase {
    ManufacturedCase {
        name: "quadratic1d".into(),
        dim: 1,
        exact_u: Arc::new(|p| p[0] * p[0] - p[0] + 1.0 / 6.0),
        exact_grad: Arc::new(|p| [2.0 * p[0] - 1.0, 0.0]),
        forcing: Arc::new(|_| -2.0),
        neumann_flux: Some(Arc::new(|_| 1.0)),
    }
}
