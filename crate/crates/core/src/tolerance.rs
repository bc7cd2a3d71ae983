//! Library-wide numerical thresholds.

use serde::Serialize;

/// Thresholds shared by the classification routines. The defaults are the
/// library's reference settings; the CLI exposes the first three as flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// ∞-norm bound on stationarity residuals for a pair to count as critical.
    pub critical: f64,
    /// Relative eigenvalue threshold (times `‖A(σ)‖₂`) for definiteness tests.
    pub psd: f64,
    /// Band around 1 within which spectral tests are undecided.
    pub band: f64,
    /// Relative residual bound for `b(σ) ∈ Im A(σ)`.
    pub range: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            critical: 1e-8,
            psd: 1e-10,
            band: 1e-6,
            range: 1e-8,
        }
    }
}
