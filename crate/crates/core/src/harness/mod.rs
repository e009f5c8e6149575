//! Convergence studies: `eta` sweeps on a fixed problem, mesh sweeps on a
//! manufactured case, log-log rate fits, and report output.

mod fit;
mod report;
mod sweep;

pub use fit::{fit_rate, RateFit};
pub use report::{FittedRates, SweepMetadata, SweepReport, SweepRow};
pub use sweep::{
    coupled_sweep, eta_sweep, gamma_value_check, h_sweep, EtaRule, GammaCheck, SweepOptions,
};

/// Decades `10^-from ..= 10^-to`, largest first.
pub fn decades(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|k| 10f64.powi(-k)).collect()
}

/// `start, 2 start, 4 start, ... <= end`.
pub fn doublings(start: usize, end: usize) -> Vec<usize> {
    std::iter::successors(Some(start), |n| Some(n * 2))
        .take_while(|n| *n <= end)
        .collect()
}
