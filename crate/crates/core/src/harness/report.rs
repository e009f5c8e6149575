use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::RateFit;
use crate::config::Tolerances;

/// One sweep point. Failed rows carry the error text and `NaN` numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h: Option<f64>,
    pub eta: Option<f64>,
    pub n_dof: usize,
    pub h1_error: f64,
    pub l2_error: f64,
    /// `V_eta(u_eta) - V(u0)`, signed.
    pub value_gap: f64,
    pub iterations: usize,
    pub residual: f64,
    /// `max_j |(Z^T M u)_j| / |u|_L`.
    pub kernel_component: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl SweepRow {
    pub(crate) fn failed(h: Option<f64>, eta: Option<f64>, n_dof: usize, message: String) -> Self {
        Self {
            h,
            eta,
            n_dof,
            h1_error: f64::NAN,
            l2_error: f64::NAN,
            value_gap: f64::NAN,
            iterations: 0,
            residual: f64::NAN,
            kernel_component: f64::NAN,
            failure: Some(message),
        }
    }

    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FittedRates {
    pub h1_rate: Option<RateFit>,
    pub l2_rate: Option<RateFit>,
    pub value_rate: Option<RateFit>,
    /// Set when no fit could be made, e.g. every error is below the floor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub case: String,
    pub formulation: String,
    pub degree: Option<usize>,
    /// Either `"fixed"`, `"coupled c=.. k=.."` or the eta list description.
    pub eta_rule: String,
    pub solver_tol: f64,
    pub tolerances: Tolerances,
    /// `sqrt(F^T H^-1 F)`, the discrete stand-in for the dual norm of the
    /// load (eta sweeps only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_dual_norm: Option<f64>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub fitted_rates: FittedRates,
    pub metadata: SweepMetadata,
    /// Whether `value_gap` strictly decreases down the rows (coupled sweeps).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_gap_decreasing: Option<bool>,
}

pub const CSV_HEADER: &str = "h,eta,n_dof,h1_error,l2_error,value_gap,iterations,residual";

fn cell(out: &mut String, v: Option<f64>) {
    match v {
        Some(x) if x.is_finite() => write!(out, "{x:.16e}").unwrap(),
        _ => out.push_str("NA"),
    }
}

impl SweepReport {
    /// Rows as CSV. The output depends only on the rows, never on timing.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            cell(&mut out, r.h);
            out.push(',');
            cell(&mut out, r.eta);
            write!(out, ",{},", r.n_dof).unwrap();
            cell(&mut out, Some(r.h1_error));
            out.push(',');
            cell(&mut out, Some(r.l2_error));
            out.push(',');
            cell(&mut out, Some(r.value_gap));
            if r.is_failed() {
                out.push_str(",NA,");
            } else {
                write!(out, ",{},", r.iterations).unwrap();
            }
            cell(&mut out, Some(r.residual));
            out.push('\n');
        }
        out
    }

    /// The JSON companion: rows, fitted rates and metadata.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn h1_slope(&self) -> Option<f64> {
        self.fitted_rates.h1_rate.map(|f| f.slope)
    }

    pub fn l2_slope(&self) -> Option<f64> {
        self.fitted_rates.l2_rate.map(|f| f.slope)
    }

    /// One-line human summary of the fitted rates.
    pub fn summary(&self) -> String {
        let show = |f: Option<RateFit>| match f {
            Some(f) => format!("{:.4}", f.slope),
            None => "NA".into(),
        };
        let mut s = format!(
            "h1_rate={} l2_rate={} value_rate={}",
            show(self.fitted_rates.h1_rate),
            show(self.fitted_rates.l2_rate),
            show(self.fitted_rates.value_rate)
        );
        if let Some(reason) = &self.fitted_rates.skipped {
            write!(s, " (fit skipped: {reason})").unwrap();
        }
        if let Some(dec) = self.value_gap_decreasing {
            write!(s, " value_gap_decreasing={dec}").unwrap();
        }
        s
    }
}
