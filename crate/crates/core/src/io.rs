//! JSON container for [`DiscreteProblem`].
//!
//! ```json
//! {
//!   "format": "kerreg-problem",
//!   "version": 1,
//!   "label": "toy",
//!   "n": 2,
//!   "stiffness": [[0, 0, 1.0], [0, 1, -1.0], [1, 0, -1.0], [1, 1, 1.0]],
//!   "mass": [[0, 0, 1.0], [1, 1, 1.0]],
//!   "h_gram": [[0, 0, 2.0], [0, 1, -1.0], [1, 0, -1.0], [1, 1, 2.0]],
//!   "load": [1.0, -1.0],
//!   "kernel": [[0.7071067811865475, 0.7071067811865475]],
//!   "tolerances": { "solver": 1e-12 }
//! }
//! ```
//!
//! Matrices are `(row, col, value)` triplets with 0-based indices; `h_gram`
//! is optional (default `A + M`); `tolerances` may list any subset of the
//! [`Tolerances`] fields. Floats are written in shortest round-trip form, so
//! a write/read cycle reproduces every value bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::problem::DiscreteProblem;

pub const FORMAT_TAG: &str = "kerreg-problem";
pub const FORMAT_VERSION: u32 = 1;

type Triplets = Vec<(usize, usize, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub format: String,
    pub version: u32,
    #[serde(default)]
    pub label: String,
    pub n: usize,
    pub stiffness: Triplets,
    pub mass: Triplets,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_gram: Option<Triplets>,
    pub load: Vec<f64>,
    pub kernel: Vec<Vec<f64>>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ProblemFile {
    pub fn from_problem(problem: &DiscreteProblem) -> Self {
        Self {
            format: FORMAT_TAG.into(),
            version: FORMAT_VERSION,
            label: problem.label().to_string(),
            n: problem.n(),
            stiffness: problem.stiffness().triplets().collect(),
            mass: problem.mass().triplets().collect(),
            h_gram: Some(problem.h_gram().triplets().collect()),
            load: problem.load().to_vec(),
            kernel: problem.kernel().columns().to_vec(),
            tolerances: *problem.tolerances(),
        }
    }

    pub fn into_problem(self) -> Result<DiscreteProblem> {
        if self.format != FORMAT_TAG {
            return Err(Error::Format(format!("unknown format tag `{}`", self.format)));
        }
        if self.version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported version {}", self.version)));
        }
        let n = self.n;
        let stiffness = SparseMatrix::from_triplets(n, n, &self.stiffness)?;
        let mass = SparseMatrix::from_triplets(n, n, &self.mass)?;
        let problem = DiscreteProblem::with_tolerances(
            self.label,
            stiffness,
            mass,
            self.load,
            &self.kernel,
            self.tolerances,
        )?;
        match self.h_gram {
            Some(h) => problem.with_h_gram(SparseMatrix::from_triplets(n, n, &h)?),
            None => Ok(problem),
        }
    }
}

pub fn to_json(problem: &DiscreteProblem) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ProblemFile::from_problem(problem))?)
}

pub fn from_json(text: &str) -> Result<DiscreteProblem> {
    serde_json::from_str::<ProblemFile>(text)?.into_problem()
}

pub fn write_problem(problem: &DiscreteProblem, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_json(problem)?)?;
    Ok(())
}

pub fn read_problem(path: impl AsRef<Path>) -> Result<DiscreteProblem> {
    from_json(&std::fs::read_to_string(path)?)
}
