//! Empirical convergence order from `(τ, E_max)` pairs.

use crate::error::{Error, Result};

/// Errors below this are treated as rounding-dominated and skipped.
pub const ERROR_FLOOR: f64 = 1e-14;

/// Least-squares slope of `ln E_max` against `ln τ`.
///
/// Samples with `E_max < 1e-14`, non-finite values or non-positive `τ` are
/// dropped; at least three distinct `τ` must remain.
pub fn convergence_order(samples: &[(f64, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(tau, e)| tau.is_finite() && *tau > 0.0 && e.is_finite() && *e >= ERROR_FLOOR)
        .map(|(tau, e)| (tau.ln(), e.ln()))
        .collect();
    let mut distinct: Vec<f64> = pts.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: distinct.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
