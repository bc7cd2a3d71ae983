//! Catalog of canonical functions `V: ℝ^m → ℝ ∪ {+∞}` with closed-form
//! conjugates and derivatives.
//!
//! Every smooth kind is built from an optional "head" acting on the first `p`
//! coordinates (sum of exponentials, or a scaled log-sum-exp) followed by a
//! weighted quadratic tail `½ Σ β_k y_k²` on the remaining coordinates:
//!
//! | kind                | head on `y_1..y_p`             | tail        |
//! |---------------------|--------------------------------|-------------|
//! | `QuadraticDiag`     | none (`p = 0`)                 | all of `y`  |
//! | `Exponential`       | `Σ exp(y_k)` (`p = m`)         | none        |
//! | `ExpPlusQuad`       | `Σ exp(y_k)`                   | `y_{p+1..}` |
//! | `LogSumExpPlusQuad` | `(1/β) log(1 + Σ exp(β y_k))`  | `y_{p+1..}` |
//!
//! `IndicatorCone` is the indicator of `C_J = {y : y_j = 0 (j ∈ J), y_j ≤ 0 (j ∉ J)}`;
//! its conjugate is the indicator of `Γ_J = {σ : σ_j ≥ 0 (j ∉ J)}`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};

/// Strict-inequality margin used by the interior predicates.
pub const INTERIOR_MARGIN: f64 = 1e-12;

/// Tolerance of the subdifferential-pair check for cone indicators.
pub const PAIR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    QuadraticDiag,
    Exponential,
    ExpPlusQuad,
    LogSumExpPlusQuad,
    IndicatorCone,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::QuadraticDiag => "QuadraticDiag",
            Kind::Exponential => "Exponential",
            Kind::ExpPlusQuad => "ExpPlusQuad",
            Kind::LogSumExpPlusQuad => "LogSumExpPlusQuad",
            Kind::IndicatorCone => "IndicatorCone",
        }
    }

    pub const ALL: [Kind; 5] = [
        Kind::QuadraticDiag,
        Kind::Exponential,
        Kind::ExpPlusQuad,
        Kind::LogSumExpPlusQuad,
        Kind::IndicatorCone,
    ];
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Smoothness class; ordered from weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SmoothnessClass {
    /// Proper, lower semicontinuous, convex.
    Gamma,
    /// Legendre type.
    GammaSC,
    /// Legendre type, C² with positive definite Hessian on the interior.
    GammaSC2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Head {
    None,
    Exp,
    LogSumExp { scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
enum Body {
    Smooth {
        head: Head,
        p: usize,
        /// weights of the quadratic tail, length `m − p`
        beta: Vec<f64>,
    },
    Cone {
        /// `equality[j]` iff `j ∈ J`
        equality: Vec<bool>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFunction {
    kind: Kind,
    m: usize,
    body: Body,
}

fn check_weights(beta: &[f64]) -> Result<()> {
    if let Some(bad) = beta.iter().find(|b| !(b.is_finite() && **b > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "quadratic weights must be positive and finite, got {bad}"
        )));
    }
    Ok(())
}

fn xlogx(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

impl CanonicalFunction {
    /// `V(y) = ½ Σ β_k y_k²`.
    pub fn quadratic_diag(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        check_weights(&beta)?;
        Ok(Self {
            kind: Kind::QuadraticDiag,
            m: beta.len(),
            body: Body::Smooth {
                head: Head::None,
                p: 0,
                beta,
            },
        })
    }

    /// `V(y) = Σ exp(y_k)`.
    pub fn exponential(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        Ok(Self {
            kind: Kind::Exponential,
            m,
            body: Body::Smooth {
                head: Head::Exp,
                p: m,
                beta: vec![],
            },
        })
    }

    /// `V(y) = Σ_{k≤p} exp(y_k) + ½ Σ_{k>p} β_k y_k²`; `beta` has length `m − p`.
    pub fn exp_plus_quad(p: usize, beta: Vec<f64>) -> Result<Self> {
        check_weights(&beta)?;
        let m = p + beta.len();
        if m == 0 {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        Ok(Self {
            kind: Kind::ExpPlusQuad,
            m,
            body: Body::Smooth {
                head: Head::Exp,
                p,
                beta,
            },
        })
    }

    /// `V(y) = (1/β) log(1 + Σ_{k≤p} exp(β y_k)) + ½ Σ_{k>p} β_k y_k²`.
    pub fn log_sum_exp_plus_quad(scale: f64, p: usize, beta: Vec<f64>) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "log-sum-exp scale must be positive, got {scale}"
            )));
        }
        check_weights(&beta)?;
        let m = p + beta.len();
        if m == 0 {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        Ok(Self {
            kind: Kind::LogSumExpPlusQuad,
            m,
            body: Body::Smooth {
                head: Head::LogSumExp { scale },
                p,
                beta,
            },
        })
    }

    /// Indicator of `C_J`; `equality` lists the (0-based) indices in `J`.
    pub fn indicator_cone(m: usize, equality: Vec<usize>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        let mut mask = vec![false; m];
        for j in equality {
            if j >= m {
                return Err(Error::InvalidParameter(format!(
                    "equality index {j} out of range for m = {m}"
                )));
            }
            if mask[j] {
                return Err(Error::InvalidParameter(format!(
                    "equality index {j} repeated"
                )));
            }
            mask[j] = true;
        }
        Ok(Self {
            kind: Kind::IndicatorCone,
            m,
            body: Body::Cone { equality: mask },
        })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn smoothness_class(&self) -> SmoothnessClass {
        match self.body {
            Body::Cone { .. } => SmoothnessClass::Gamma,
            Body::Smooth { .. } => SmoothnessClass::GammaSC2,
        }
    }

    /// Size of the exponential / log-sum-exp head (0 for the other kinds).
    pub fn head_len(&self) -> usize {
        match &self.body {
            Body::Smooth { p, .. } => *p,
            Body::Cone { .. } => 0,
        }
    }

    /// Quadratic-tail weights (empty for the cone).
    pub fn tail_weights(&self) -> &[f64] {
        match &self.body {
            Body::Smooth { beta, .. } => beta,
            Body::Cone { .. } => &[],
        }
    }

    /// Scale of the log-sum-exp head, if any.
    pub fn lse_scale(&self) -> Option<f64> {
        match &self.body {
            Body::Smooth {
                head: Head::LogSumExp { scale },
                ..
            } => Some(*scale),
            _ => None,
        }
    }

    /// Equality set `J` of a cone indicator (0-based), otherwise `None`.
    pub fn equality_set(&self) -> Option<Vec<usize>> {
        match &self.body {
            Body::Cone { equality } => Some(
                equality
                    .iter()
                    .enumerate()
                    .filter_map(|(j, e)| e.then_some(j))
                    .collect(),
            ),
            Body::Smooth { .. } => None,
        }
    }

    pub fn is_equality_index(&self, j: usize) -> bool {
        matches!(&self.body, Body::Cone { equality } if equality[j])
    }

    fn check(&self, v: &Vector, what: &'static str) -> Result<()> {
        if v.len() != self.m {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.m,
                found: v.len(),
            });
        }
        Ok(())
    }

    fn unsupported(&self, op: &'static str) -> Error {
        Error::UnsupportedForKind {
            op,
            kind: self.kind.name(),
        }
    }

    pub fn in_dom(&self, y: &Vector) -> bool {
        match &self.body {
            Body::Smooth { .. } => y.iter().all(|v| v.is_finite()),
            Body::Cone { equality } => {
                y.iter()
                    .zip(equality)
                    .all(|(v, &eq)| if eq { *v == 0.0 } else { *v <= 0.0 })
            }
        }
    }

    pub fn in_int_dom(&self, y: &Vector) -> bool {
        match &self.body {
            Body::Smooth { .. } => y.iter().all(|v| v.is_finite()),
            Body::Cone { equality } => y
                .iter()
                .zip(equality)
                .all(|(v, &eq)| !eq && *v < -INTERIOR_MARGIN),
        }
    }

    pub fn in_dom_conj(&self, sigma: &Vector) -> bool {
        if sigma.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match &self.body {
            Body::Smooth { head, p, .. } => {
                let s = &sigma.as_slice()[..*p];
                match head {
                    Head::None => true,
                    Head::Exp => s.iter().all(|v| *v >= 0.0),
                    Head::LogSumExp { .. } => {
                        s.iter().all(|v| *v >= 0.0) && s.iter().sum::<f64>() <= 1.0
                    }
                }
            }
            Body::Cone { equality } => sigma.iter().zip(equality).all(|(v, &eq)| eq || *v >= 0.0),
        }
    }

    pub fn in_int_dom_conj(&self, sigma: &Vector) -> bool {
        if sigma.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match &self.body {
            Body::Smooth { head, p, .. } => {
                let s = &sigma.as_slice()[..*p];
                match head {
                    Head::None => true,
                    Head::Exp => s.iter().all(|v| *v > INTERIOR_MARGIN),
                    Head::LogSumExp { .. } => {
                        s.iter().all(|v| *v > INTERIOR_MARGIN)
                            && 1.0 - s.iter().sum::<f64>() > INTERIOR_MARGIN
                    }
                }
            }
            Body::Cone { equality } => sigma
                .iter()
                .zip(equality)
                .all(|(v, &eq)| eq || *v > INTERIOR_MARGIN),
        }
    }

    /// `V(y)`, `+∞` outside `dom V`.
    pub fn value(&self, y: &Vector) -> Result<f64> {
        self.check(y, "y")?;
        if !self.in_dom(y) {
            return Ok(f64::INFINITY);
        }
        Ok(match &self.body {
            Body::Cone { .. } => 0.0,
            Body::Smooth { head, p, beta } => {
                let ys = y.as_slice();
                let head_val = match head {
                    Head::None => 0.0,
                    Head::Exp => ys[..*p].iter().map(|v| v.exp()).sum(),
                    Head::LogSumExp { scale } => {
                        // log(1 + Σ e^{β y}) with the implicit zero logit
                        let top = ys[..*p].iter().map(|v| scale * v).fold(0.0_f64, f64::max);
                        let s: f64 = (-top).exp()
                            + ys[..*p]
                                .iter()
                                .map(|v| (scale * v - top).exp())
                                .sum::<f64>();
                        (top + s.ln()) / scale
                    }
                };
                let tail: f64 = ys[*p..]
                    .iter()
                    .zip(beta)
                    .map(|(v, b)| 0.5 * b * v * v)
                    .sum();
                head_val + tail
            }
        })
    }

    /// `V*(σ)`, `+∞` outside `dom V*`.
    pub fn conjugate(&self, sigma: &Vector) -> Result<f64> {
        self.check(sigma, "sigma")?;
        if !self.in_dom_conj(sigma) {
            return Ok(f64::INFINITY);
        }
        Ok(match &self.body {
            Body::Cone { .. } => 0.0,
            Body::Smooth { head, p, beta } => {
                let s = sigma.as_slice();
                let head_val = match head {
                    Head::None => 0.0,
                    Head::Exp => s[..*p].iter().map(|&t| xlogx(t) - t).sum(),
                    Head::LogSumExp { scale } => {
                        let total: f64 = s[..*p].iter().sum();
                        let rest = (1.0 - total).max(0.0);
                        (s[..*p].iter().map(|&t| xlogx(t)).sum::<f64>() + xlogx(rest)) / scale
                    }
                };
                let tail: f64 = s[*p..].iter().zip(beta).map(|(t, b)| 0.5 * t * t / b).sum();
                head_val + tail
            }
        })
    }

    /// `∇V(y)` for `y ∈ int dom V`.
    pub fn grad(&self, y: &Vector) -> Result<Vector> {
        self.check(y, "y")?;
        let Body::Smooth { head, p, beta } = &self.body else {
            return Err(self.unsupported("grad"));
        };
        if !self.in_int_dom(y) {
            return Err(Error::BoundaryOrOutsideDomain("y not in int dom V".into()));
        }
        let mut g = Vector::zeros(self.m);
        match head {
            Head::None => {}
            Head::Exp => {
                for k in 0..*p {
                    g[k] = y[k].exp();
                }
            }
            Head::LogSumExp { scale } => {
                let s = softmax_head(&y.as_slice()[..*p], *scale);
                for k in 0..*p {
                    g[k] = s[k];
                }
            }
        }
        for (k, b) in beta.iter().enumerate() {
            g[p + k] = b * y[p + k];
        }
        Ok(g)
    }

    /// `∇²V(y)` for `y ∈ int dom V`.
    pub fn hess(&self, y: &Vector) -> Result<Matrix> {
        self.check(y, "y")?;
        let Body::Smooth { head, p, beta } = &self.body else {
            return Err(self.unsupported("hess"));
        };
        if !self.in_int_dom(y) {
            return Err(Error::BoundaryOrOutsideDomain("y not in int dom V".into()));
        }
        let mut h = Matrix::zeros(self.m, self.m);
        match head {
            Head::None => {}
            Head::Exp => {
                for k in 0..*p {
                    h[(k, k)] = y[k].exp();
                }
            }
            Head::LogSumExp { scale } => {
                let s = softmax_head(&y.as_slice()[..*p], *scale);
                for i in 0..*p {
                    for j in 0..*p {
                        let diag = if i == j { s[i] } else { 0.0 };
                        h[(i, j)] = scale * (diag - s[i] * s[j]);
                    }
                }
            }
        }
        for (k, b) in beta.iter().enumerate() {
            h[(p + k, p + k)] = *b;
        }
        Ok(h)
    }

    /// `∇V*(σ) = (∇V)⁻¹(σ)` for `σ ∈ int dom V*`.
    ///
    /// The cone indicator is constant on `int Γ_J`, so its gradient there is zero.
    pub fn conj_grad(&self, sigma: &Vector) -> Result<Vector> {
        self.check(sigma, "sigma")?;
        if !self.in_int_dom_conj(sigma) {
            return Err(Error::BoundaryOrOutsideDomain(
                "sigma not in int dom V*".into(),
            ));
        }
        let Body::Smooth { head, p, beta } = &self.body else {
            return Ok(Vector::zeros(self.m));
        };
        let mut g = Vector::zeros(self.m);
        match head {
            Head::None => {}
            Head::Exp => {
                for k in 0..*p {
                    g[k] = sigma[k].ln();
                }
            }
            Head::LogSumExp { scale } => {
                let rest = 1.0 - sigma.rows(0, *p).sum();
                for k in 0..*p {
                    g[k] = (sigma[k].ln() - rest.ln()) / scale;
                }
            }
        }
        for (k, b) in beta.iter().enumerate() {
            g[p + k] = sigma[p + k] / b;
        }
        Ok(g)
    }

    /// `∇²V*(σ)` for `σ ∈ int dom V*` (zero for the cone indicator).
    pub fn conj_hess(&self, sigma: &Vector) -> Result<Matrix> {
        self.check(sigma, "sigma")?;
        if !self.in_int_dom_conj(sigma) {
            return Err(Error::BoundaryOrOutsideDomain(
                "sigma not in int dom V*".into(),
            ));
        }
        let Body::Smooth { head, p, beta } = &self.body else {
            return Ok(Matrix::zeros(self.m, self.m));
        };
        let mut h = Matrix::zeros(self.m, self.m);
        match head {
            Head::None => {}
            Head::Exp => {
                for k in 0..*p {
                    h[(k, k)] = 1.0 / sigma[k];
                }
            }
            Head::LogSumExp { scale } => {
                let rest = 1.0 - sigma.rows(0, *p).sum();
                for i in 0..*p {
                    for j in 0..*p {
                        let diag = if i == j { 1.0 / sigma[i] } else { 0.0 };
                        h[(i, j)] = (diag + 1.0 / rest) / scale;
                    }
                }
            }
        }
        for (k, b) in beta.iter().enumerate() {
            h[(p + k, p + k)] = 1.0 / b;
        }
        Ok(h)
    }

    /// `σ ∈ ∂V_J(y)`, i.e. `y_j = 0` on `J` and `y_j ≤ 0, σ_j ≥ 0, y_j σ_j = 0` off `J`.
    pub fn subdifferential_pair_check(&self, y: &Vector, sigma: &Vector) -> Result<bool> {
        self.check(y, "y")?;
        self.check(sigma, "sigma")?;
        let Body::Cone { equality } = &self.body else {
            return Err(self.unsupported("subdifferential_pair_check"));
        };
        Ok((0..self.m).all(|j| {
            if equality[j] {
                y[j].abs() <= PAIR_TOL
            } else {
                y[j] <= PAIR_TOL && sigma[j] >= -PAIR_TOL && (y[j] * sigma[j]).abs() <= PAIR_TOL
            }
        }))
    }
}

/// `e^{β y_k} / (1 + Σ_j e^{β y_j})`, computed with a shifted exponent.
fn softmax_head(y: &[f64], scale: f64) -> Vec<f64> {
    let top = y.iter().map(|v| scale * v).fold(0.0_f64, f64::max);
    let e: Vec<f64> = y.iter().map(|v| (scale * v - top).exp()).collect();
    let denom = (-top).exp() + e.iter().sum::<f64>();
    e.into_iter().map(|v| v / denom).collect()
}
