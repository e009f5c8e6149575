use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use kerreg::formulations::ConditionEstimate;
use kerreg::{Formulation, Solution};
use serde::Serialize;

use crate::{Failure, OutputArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

/// Writes the report in the requested format to `--output`, or to standard
/// output when no path is given.
pub fn emit(out: &OutputArgs, csv: String, json: String) -> Result<(), Failure> {
    let mut text = match out.format {
        Format::Csv => csv,
        Format::Json => json,
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &out.output {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

pub fn solution_csv(s: &Solution) -> String {
    let mut out = String::from("index,u\n");
    for (i, v) in s.u.iter().enumerate() {
        writeln!(out, "{i},{v:.16e}").unwrap();
    }
    out
}

pub fn condition_csv(f: Formulation, param: f64, e: &ConditionEstimate) -> String {
    format!(
        "formulation,parameter,largest,smallest,condition,converged\n{f},{param:.16e},{:.16e},{:.16e},{:.16e},{}\n",
        e.largest, e.smallest, e.condition, e.converged
    )
}
