//! Spectra of `Q = H Hᵀ` and `R = Hᵀ H` for a linear map `H: ℝ^m → ℝ^n`.
//!
//! `α = max_{‖x‖=1} ‖Hᵀx‖² = λ_max(Q)` and `β = max_{‖y‖=1} ‖Hy‖² = λ_max(R)`
//! coincide, as do the smallest positive eigenvalues `γ` of `Q` and `δ` of `R`.
//! Both spectra are computed independently so the identities can be checked.

use serde::Serialize;

use crate::linalg::{sym_eigen, Matrix};

/// Relative cutoff (times `max(1, λ_max)`) below which an eigenvalue counts as zero.
pub const POSITIVE_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    /// `λ_max(H Hᵀ)`
    pub alpha: f64,
    /// `λ_max(Hᵀ H)`
    pub beta: f64,
    /// Smallest positive eigenvalue of `H Hᵀ`; absent iff `H = 0`.
    pub gamma: Option<f64>,
    /// Smallest positive eigenvalue of `Hᵀ H`; absent iff `H = 0`.
    pub delta: Option<f64>,
    /// Number of positive eigenvalues of `H Hᵀ`.
    pub rank: usize,
    /// Multiplicity of 0 in the spectrum of `H Hᵀ` (`n × n`).
    pub ker_q_dim: usize,
    /// Multiplicity of 0 in the spectrum of `Hᵀ H` (`m × m`).
    pub ker_r_dim: usize,
    /// Ascending eigenvalues of `H Hᵀ`.
    pub q_eigenvalues: Vec<f64>,
    /// Ascending eigenvalues of `Hᵀ H`.
    pub r_eigenvalues: Vec<f64>,
    /// Unit eigenvector of `H Hᵀ` for `alpha`.
    pub alpha_witness: Vec<f64>,
}

impl SpectralSummary {
    pub fn lambda_min_q(&self) -> f64 {
        self.q_eigenvalues[0]
    }

    pub fn lambda_min_r(&self) -> f64 {
        self.r_eigenvalues[0]
    }
}

struct Half {
    values: Vec<f64>,
    top_vector: Vec<f64>,
    positive: usize,
    min_positive: Option<f64>,
}

fn half(gram: &Matrix) -> Half {
    let (values, vectors) = sym_eigen(gram);
    let values: Vec<f64> = values.iter().copied().collect();
    let top = *values.last().expect("nonempty spectrum");
    let cutoff = POSITIVE_CUTOFF * top.max(1.0);
    let positive = values.iter().filter(|&&l| l > cutoff).count();
    let min_positive = values.iter().copied().find(|&l| l > cutoff);
    Half {
        top_vector: vectors.column(values.len() - 1).iter().copied().collect(),
        values,
        positive,
        min_positive,
    }
}

pub fn spectral_summary(h: &Matrix) -> SpectralSummary {
    let q = half(&(h * h.transpose()));
    let r = half(&(h.transpose() * h));
    SpectralSummary {
        alpha: q.values[q.values.len() - 1].max(0.0),
        beta: r.values[r.values.len() - 1].max(0.0),
        gamma: q.min_positive,
        delta: r.min_positive,
        rank: q.positive,
        ker_q_dim: q.values.len() - q.positive,
        ker_r_dim: r.values.len() - r.positive,
        q_eigenvalues: q.values,
        r_eigenvalues: r.values,
        alpha_witness: q.top_vector,
    }
}

/// `(Im H = ℝⁿ, ker H = {0})`.
pub fn kernel_image_flags(h: &Matrix) -> (bool, bool) {
    let s = spectral_summary(h);
    (s.ker_q_dim == 0, s.ker_r_dim == 0)
}
