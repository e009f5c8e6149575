use std::path::PathBuf;

use clap::Args;
use kerreg::fem::{
    assemble, build_interval_mesh, build_unit_square_mesh, case_cosine_1d, case_cosine_2d,
    ManufacturedCase,
};
use kerreg::io::read_problem;
use kerreg::linalg::SparseMatrix;
use kerreg::{DiscreteProblem, Tolerances};

use crate::Failure;

#[derive(Debug, Args)]
pub struct CaseArgs {
    /// Problem: cosine1d, cosine2d, toy2x2, or from-file (with --file).
    #[arg(long)]
    pub case: String,
    /// Problem file in the kerreg JSON format (case from-file).
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Polynomial degree of the finite elements.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
}

pub enum Case {
    Manufactured(ManufacturedCase),
    Toy,
    File(PathBuf),
}

impl Case {
    pub fn parse(name: &str, file: Option<&PathBuf>) -> Result<Self, Failure> {
        let case = match name {
            "cosine1d" => Case::Manufactured(case_cosine_1d()),
            "cosine2d" => Case::Manufactured(case_cosine_2d()),
            "toy2x2" => Case::Toy,
            "from-file" => {
                let path = file.ok_or_else(|| Failure::Usage("case from-file needs --file".into()))?;
                return Ok(Case::File(path.clone()));
            }
            other => {
                return Err(Failure::UnknownCase(format!(
                    "unknown case `{other}` (expected cosine1d, cosine2d, toy2x2, from-file)"
                )))
            }
        };
        if file.is_some() {
            return Err(Failure::Usage("--file is only valid with --case from-file".into()));
        }
        Ok(case)
    }
}

/// `A = [[1, -1], [-1, 1]]`, `M = I`, `F = (1, -1)`.
pub fn toy_problem() -> DiscreteProblem {
    DiscreteProblem::new(
        "toy2x2",
        SparseMatrix::from_dense(&[vec![1.0, -1.0], vec![-1.0, 1.0]]),
        SparseMatrix::identity(2),
        vec![1.0, -1.0],
        &[vec![1.0, 1.0]],
    )
    .expect("toy problem is valid")
}

/// Tolerance overrides from the environment.
fn env_tolerances(mut t: Tolerances) -> Result<Tolerances, Failure> {
    let read = |name: &str| -> Result<Option<f64>, Failure> {
        match std::env::var(name) {
            Ok(v) => v
                .trim()
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Failure::Usage(format!("{name}: `{v}` is not a number"))),
            Err(_) => Ok(None),
        }
    };
    if let Some(v) = read("KERREG_CONSISTENCY_TOL")? {
        t.consistency = v;
    }
    if let Some(v) = read("KERREG_KERNEL_TOL")? {
        t.kernel_membership = v;
    }
    if let Some(v) = read("KERREG_EIG_TOL")? {
        t.eig = v;
    }
    if let Some(v) = read("KERREG_DENSE_CUTOFF")? {
        t.dense_cutoff = v as usize;
    }
    Ok(t)
}

impl CaseArgs {
    fn resolve(&self) -> Result<Case, Failure> {
        Case::parse(&self.case, self.file.as_ref())
    }

    /// The discrete problem for a solve, comparison, or eta sweep.
    pub fn problem(&self, n: usize) -> Result<DiscreteProblem, Failure> {
        let mut problem = match self.resolve()? {
            Case::Manufactured(case) => {
                let mesh = match case.dim {
                    1 => build_interval_mesh(n, self.degree)?,
                    _ => build_unit_square_mesh(n, self.degree)?,
                };
                assemble(&mesh, &case)?
            }
            Case::Toy => toy_problem(),
            Case::File(path) => {
                let problem = read_problem(&path).map_err(|e| match Failure::from(e) {
                    Failure::Io(m) => Failure::Io(format!("{}: {m}", path.display())),
                    other => other,
                })?;
                if problem.label().is_empty() {
                    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
                    problem.with_label(stem.unwrap_or_else(|| "from-file".into()))
                } else {
                    problem
                }
            }
        };
        let tolerances = env_tolerances(*problem.tolerances())?;
        problem.set_tolerances(tolerances);
        Ok(problem)
    }

    /// The manufactured case and degree for a mesh sweep.
    pub fn manufactured(&self) -> Result<(ManufacturedCase, usize), Failure> {
        match self.resolve()? {
            Case::Manufactured(case) => Ok((case, self.degree)),
            _ => Err(Failure::Usage(format!(
                "case `{}` has no exact solution; mesh sweeps need cosine1d or cosine2d",
                self.case
            ))),
        }
    }
}
